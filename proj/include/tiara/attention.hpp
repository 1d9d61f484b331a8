#pragma once
// Temporal attention along the frame axis and its time-frequency reweighting.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tiara/matrix.hpp"
#include "tiara/spectral.hpp"

namespace tiara::attention {

/// Pre-softmax N x N frame scores; any 1/sqrt(d_k) scale is already applied.
class AttentionLogits {
 public:
  explicit AttentionLogits(Matrix scores);
  const Matrix& scores() const noexcept { return scores_; }
  std::size_t frames() const noexcept { return scores_.rows(); }

 private:
  Matrix scores_;
};

/// Row-stochastic N x N matrix: entries in [0, 1], rows sum to 1 within 1e-9.
class AttentionMap {
 public:
  explicit AttentionMap(Matrix rows);
  const Matrix& matrix() const noexcept { return rows_; }
  std::size_t frames() const noexcept { return rows_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return rows_(i, j); }
  spectral::Signal row_signal(std::size_t i) const;

 private:
  Matrix rows_;
};

/// Per-frame value vectors at one spatial location, N x d_v.
class VideoLatentSlice {
 public:
  explicit VideoLatentSlice(Matrix values);
  const Matrix& values() const noexcept { return values_; }
  std::size_t frames() const noexcept { return values_.rows(); }
  std::size_t channels() const noexcept { return values_.cols(); }
  /// Largest absolute entry (the value bound B_V).
  double max_abs() const noexcept;

 private:
  Matrix values_;
};

/// Additive pre-softmax penalty: diagonal plus lower-left/upper-right corner
/// triangles, zero elsewhere, symmetric, all entries <= 0.
struct ReweightMatrix {
  Matrix lambda;
  double alpha = 0.0;
  std::size_t corner_size = 0;
  double corner_penalty = 0.0;
};

/// Frequency thresholds for motion intensity: high band [phi1, phi2) over the
/// one-sided spectrum of the padded row.
struct FrequencyBand {
  std::size_t phi1 = 0;
  std::size_t phi2 = 0;

  /// phi1 = ceil(P/8), phi2 = floor(P/2) + 1 for padded length P (phi1 = 0 when P = 1).
  static FrequencyBand defaults(std::size_t padded_length) noexcept;
  /// Throws DomainError unless 0 <= phi1 < phi2 <= floor(P/2) + 1.
  void validate(std::size_t padded_length) const;

  friend bool operator==(const FrequencyBand&, const FrequencyBand&) = default;
};

struct MotionProfile {
  std::vector<double> rho;
  FrequencyBand band;
  spectral::Window window;
};

struct ReweightedAttention {
  AttentionMap attention;
  VideoLatentSlice output;
};

/// Row-wise softmax with max subtraction.
AttentionMap softmax_rows(const AttentionLogits& logits);

/// softmax(logits + lambda) and its product with the values.
ReweightedAttention reweighted_attention(const AttentionLogits& logits, const ReweightMatrix& lam,
                                         const VideoLatentSlice& values);

/// Diagonal-only reweighting applied directly to an attention map: for row i
/// with d = A_ii and s = 1 - (1 - e^-alpha) d, the diagonal becomes e^-alpha d / s
/// and every other entry A_ij / s. Equals softmax(logits - alpha I).
AttentionMap closed_form_diagonal_reweight(const AttentionMap& a, double alpha);

/// Padded length of an N-frame row for a window of length L: N + 2 floor(L/2).
std::size_t padded_length(std::size_t frames, const spectral::Window& w) noexcept;

/// One-sided DSTFT bins [0, bins) of row i used by motion_intensity: the row is
/// mean-centred, padded periodically by floor(L/2) on each side and the window
/// is centred on the original sample i.
std::vector<std::complex<double>> motion_spectrum(const spectral::Signal& row,
                                                  const spectral::Window& w, std::size_t i,
                                                  std::size_t bins);

/// High-frequency share of the row's windowed power at frame i, in [0, 1].
/// Returns 0 for constant rows.
double motion_intensity(const spectral::Signal& row, const spectral::Window& w, std::size_t i,
                        const FrequencyBand& band);
double motion_intensity(const spectral::Signal& row, const spectral::Window& w, std::size_t i);

/// rho for every row of an attention map (default band when none is given).
MotionProfile estimate_motion(const AttentionMap& a, const spectral::Window& w,
                              std::optional<FrequencyBand> band = std::nullopt);

/// Diagonal -alpha (1 - rho_i); corner triangles of size c set to -beta.
ReweightMatrix build_reweight_matrix(const MotionProfile& motion, double alpha,
                                     std::size_t corner_size, double corner_penalty);

struct TiaraOptions {
  spectral::Window window = spectral::make_window(spectral::WindowKind::kBlackman, 9);
  std::optional<FrequencyBand> band;
  double alpha = 6.0;
  std::optional<std::size_t> corner_size;  // default floor(N/4)
  std::optional<double> corner_penalty;    // default alpha / 2
  unsigned threads = 0;                    // 0: TIARA_THREADS or hardware

  std::size_t corner_size_for(std::size_t frames) const noexcept {
    return corner_size.value_or(frames / 4);
  }
  double corner_penalty_value() const noexcept { return corner_penalty.value_or(alpha / 2.0); }
};

struct TiaraCell {
  MotionProfile motion;
  AttentionMap attention;  // softmax(logits + lambda)
  VideoLatentSlice output;
};

/// Reweights every spatial location independently. Inputs are flattened
/// fields in matching order; all locations must share the frame count.
std::vector<TiaraCell> tiara(std::span<const AttentionLogits> logits,
                             std::span<const VideoLatentSlice> values, const TiaraOptions& options);

}  // namespace tiara::attention
