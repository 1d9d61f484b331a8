#include "tiara/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tiara/errors.hpp"
#include "tiara/parallel.hpp"
#include "tiara/simd/kernels.hpp"

namespace tiara::attention {
namespace {

constexpr double kRowSumTolerance = 1e-9;
// Rows whose centred magnitude falls below this fraction of the row scale
// carry no motion.
constexpr double kConstantRowTolerance = 1e-12;

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

AttentionLogits::AttentionLogits(Matrix scores) : scores_(std::move(scores)) {
  if (!scores_.is_square() || scores_.rows() == 0)
    throw DomainError("attention logits must be a non-empty square matrix, got " + shape(scores_));
  if (!scores_.all_finite()) throw DomainError("attention logits contain non-finite entries");
}

AttentionMap::AttentionMap(Matrix rows) : rows_(std::move(rows)) {
  if (!rows_.is_square() || rows_.rows() == 0)
    throw DomainError("attention map must be a non-empty square matrix, got " + shape(rows_));
  for (std::size_t i = 0; i < rows_.rows(); ++i) {
    double total = 0.0;
    for (double v : rows_.row(i)) {
      if (!(v >= 0.0 && v <= 1.0))
        throw DomainError("attention map row " + std::to_string(i) + " has entry outside [0, 1]");
      total += v;
    }
    if (std::abs(total - 1.0) > kRowSumTolerance)
      throw DomainError("attention map row " + std::to_string(i) + " sums to " +
                        std::to_string(total));
  }
}

spectral::Signal AttentionMap::row_signal(std::size_t i) const {
  const auto r = rows_.row(i);
  return spectral::Signal(std::vector<double>(r.begin(), r.end()));
}

VideoLatentSlice::VideoLatentSlice(Matrix values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0)
    throw DomainError("value slice must be non-empty, got " + shape(values_));
  if (!values_.all_finite()) throw DomainError("value slice contains non-finite entries");
}

double VideoLatentSlice::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_.data()) m = std::max(m, std::abs(v));
  return m;
}

FrequencyBand FrequencyBand::defaults(std::size_t padded_length) noexcept {
  const std::size_t phi2 = padded_length / 2 + 1;
  // A single padded sample has one bin; the band then covers all of it.
  return {std::min((padded_length + 7) / 8, phi2 - 1), phi2};
}

void FrequencyBand::validate(std::size_t padded_length) const {
  const std::size_t limit = padded_length / 2 + 1;
  if (!(phi1 < phi2 && phi2 <= limit))
    throw DomainError("frequency thresholds require 0 <= phi1 < phi2 <= " + std::to_string(limit) +
                      ", got phi1=" + std::to_string(phi1) + " phi2=" + std::to_string(phi2));
}

AttentionMap softmax_rows(const AttentionLogits& logits) {
  const auto& kern = simd::active();
  Matrix out = logits.scores();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    const double m = kern.max(r.data(), r.size());
    for (double& v : r) v = std::exp(v - m);
    kern.divide(r.data(), r.size(), kern.sum(r.data(), r.size()));
  }
  return AttentionMap(std::move(out));
}

ReweightedAttention reweighted_attention(const AttentionLogits& logits, const ReweightMatrix& lam,
                                         const VideoLatentSlice& values) {
  const Matrix& s = logits.scores();
  if (lam.lambda.rows() != s.rows() || lam.lambda.cols() != s.cols())
    throw DomainError("reweight matrix " + shape(lam.lambda) + " does not match logits " +
                      shape(s));
  if (values.frames() != s.rows())
    throw DomainError("value slice " + shape(values.values()) + " does not match logits " +
                      shape(s));
  AttentionMap a = softmax_rows(AttentionLogits(s + lam.lambda));
  VideoLatentSlice z(multiply(a.matrix(), values.values()));
  return {std::move(a), std::move(z)};
}

AttentionMap closed_form_diagonal_reweight(const AttentionMap& a, double alpha) {
  const double keep = std::exp(-alpha);
  Matrix out = a.matrix();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const double d = a(i, i);
    const double denom = 1.0 - (1.0 - keep) * d;
    for (double& v : out.row(i)) v /= denom;
    out(i, i) = keep * d / denom;
  }
  return AttentionMap(std::move(out));
}

std::size_t padded_length(std::size_t frames, const spectral::Window& w) noexcept {
  return frames + 2 * (w.length() / 2);
}

std::vector<std::complex<double>> motion_spectrum(const spectral::Signal& row,
                                                  const spectral::Window& w, std::size_t i,
                                                  std::size_t bins) {
  const std::size_t n = row.size();
  if (i >= n)
    throw DomainError("row index " + std::to_string(i) + " out of range [0, " + std::to_string(n) +
                      ")");
  const double mean = simd::sum(row.values()) / static_cast<double>(n);
  std::vector<double> centred(row.values().begin(), row.values().end());
  for (double& v : centred) v -= mean;
  const auto half = static_cast<std::size_t>(w.half());
  const auto padded = spectral::pad_periodic(spectral::Signal(std::move(centred)), half, half);
  return spectral::dstft_bins(padded, w, static_cast<std::int64_t>(i + half), 0, bins);
}

double motion_intensity(const spectral::Signal& row, const spectral::Window& w, std::size_t i,
                        const FrequencyBand& band) {
  const std::size_t padded = padded_length(row.size(), w);
  band.validate(padded);
  if (i >= row.size())
    throw DomainError("row index " + std::to_string(i) + " out of range [0, " +
                      std::to_string(row.size()) + ")");

  const double mean = simd::sum(row.values()) / static_cast<double>(row.size());
  double scale = 0.0;
  double spread = 0.0;
  for (double v : row.values()) {
    scale = std::max(scale, std::abs(v));
    spread = std::max(spread, std::abs(v - mean));
  }
  if (spread <= kConstantRowTolerance * scale) return 0.0;

  const auto bins = motion_spectrum(row, w, i, band.phi2);
  double high = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double p = std::norm(bins[k]);
    total += p;
    if (k >= band.phi1) high += p;
  }
  if (!(total > 0.0)) return 0.0;
  return std::clamp(high / total, 0.0, 1.0);
}

double motion_intensity(const spectral::Signal& row, const spectral::Window& w, std::size_t i) {
  return motion_intensity(row, w, i, FrequencyBand::defaults(padded_length(row.size(), w)));
}

MotionProfile estimate_motion(const AttentionMap& a, const spectral::Window& w,
                              std::optional<FrequencyBand> band) {
  const std::size_t n = a.frames();
  MotionProfile profile{{}, band.value_or(FrequencyBand::defaults(padded_length(n, w))), w};
  profile.band.validate(padded_length(n, w));
  profile.rho.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    profile.rho.push_back(motion_intensity(a.row_signal(i), w, i, profile.band));
  return profile;
}

ReweightMatrix build_reweight_matrix(const MotionProfile& motion, double alpha,
                                     std::size_t corner_size, double corner_penalty) {
  const std::size_t n = motion.rho.size();
  if (n == 0) throw DomainError("motion profile is empty");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw DomainError("alpha must be finite and >= 0");
  if (!(corner_penalty >= 0.0) || !std::isfinite(corner_penalty))
    throw DomainError("corner penalty must be finite and >= 0");
  if (corner_size > n / 2)
    throw DomainError("corner size " + std::to_string(corner_size) + " exceeds floor(N/2) = " +
                      std::to_string(n / 2));

  ReweightMatrix out{Matrix(n, n), alpha, corner_size, corner_penalty};
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = motion.rho[i];
    if (!(rho >= 0.0 && rho <= 1.0))
      throw DomainError("motion intensity " + std::to_string(i) + " outside [0, 1]");
    out.lambda(i, i) = -alpha * (1.0 - rho);
  }
  // Upper-right triangle: i + (N-1-j) < c; the lower-left one is its mirror.
  for (std::size_t i = 0; i < corner_size; ++i)
    for (std::size_t j = n - corner_size + i; j < n; ++j) {
      out.lambda(i, j) = -corner_penalty;
      out.lambda(j, i) = -corner_penalty;
    }
  return out;
}

std::vector<TiaraCell> tiara(std::span<const AttentionLogits> logits,
                             std::span<const VideoLatentSlice> values,
                             const TiaraOptions& options) {
  if (logits.size() != values.size())
    throw DomainError("logits field has " + std::to_string(logits.size()) +
                      " locations but values field has " + std::to_string(values.size()));
  if (logits.empty()) return {};
  const std::size_t n = logits.front().frames();
  for (std::size_t c = 0; c < logits.size(); ++c)
    if (logits[c].frames() != n || values[c].frames() != n)
      throw DomainError("location " + std::to_string(c) + " does not have " + std::to_string(n) +
                        " frames");
  const FrequencyBand band =
      options.band.value_or(FrequencyBand::defaults(padded_length(n, options.window)));
  band.validate(padded_length(n, options.window));
  const std::size_t corner = options.corner_size_for(n);
  const double beta = options.corner_penalty_value();

  std::vector<std::optional<TiaraCell>> cells(logits.size());
  parallel_for(logits.size(), options.threads, [&](std::size_t c) {
    const AttentionMap a = softmax_rows(logits[c]);
    MotionProfile motion = estimate_motion(a, options.window, band);
    const ReweightMatrix lam = build_reweight_matrix(motion, options.alpha, corner, beta);
    auto result = reweighted_attention(logits[c], lam, values[c]);
    cells[c].emplace(TiaraCell{std::move(motion), std::move(result.attention),
                               std::move(result.output)});
  });
  std::vector<TiaraCell> out;
  out.reserve(cells.size());
  for (auto& c : cells) out.push_back(std::move(*c));
  return out;
}

}  // namespace tiara::attention
