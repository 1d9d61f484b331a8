#pragma once
// Numerical check of the diagonal-reweighting inconsistency bound on synthetic
// attention systems: measure the separation coefficient kappa, build alpha in
// closed form, reweight, and compare E(y, tau) against E(x, tau).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tiara/attention.hpp"
#include "tiara/spectral.hpp"

namespace tiara::verifier {

/// Denominator floor for the closed-form alpha.
inline constexpr double kAlphaDenominatorFloor = 1e-12;
/// Shifts with E(x, tau) below this are excluded from the ratio.
inline constexpr double kErrorFloor = 1e-12;

/// e^-alpha / (1 - (1 - e^-alpha) a)
double iota(double alpha, double a);
/// (1 - e^-alpha) / (1 - (1 - e^-alpha) a)
double lambda_coef(double alpha, double a);

/// alpha = log((1 - kappa - a_min eta) / (eta (1 - a_min) - kappa)), which makes
/// iota(alpha, a_min) + kappa lambda(alpha, a_min) equal eta.
/// Throws InfeasibleError naming the violated inequality.
double alpha_from_closed_form(double kappa, double eta, double a_min);

/// Finite-N headroom on the asymptotic bound: 0.05 for N >= 128, else 0.15.
double slack_for(std::size_t frames) noexcept;

/// Logits exp(-decay * d(i, j)) with d the circular distance; the softmax is
/// exactly circulant.
attention::AttentionLogits gen_homogeneous_attention(std::size_t frames, double decay);

/// Deterministic value vector: a low-frequency carrier of amplitude
/// (bound - hf_amplitude) with seeded frequency (1 or 2) and phase, plus a tone of
/// amplitude hf_amplitude at `hf_bin` (default: Nyquist, floor(N/2)).
/// Every |v_i| <= bound.
std::vector<double> gen_inconsistent_values(std::size_t frames, double bound, double hf_amplitude,
                                            std::uint64_t seed,
                                            std::optional<std::size_t> hf_bin = std::nullopt);

struct TheoremInstance {
  attention::AttentionLogits logits;
  attention::AttentionMap attention;  // softmax(logits)
  std::vector<double> values;
  spectral::Window window;
  std::size_t k_threshold = 5;
  double eta = 0.9;

  // Measured on construction.
  double kappa_hat = 0.0;
  double a_min = 0.0;
  double homogeneity = 0.0;
  double value_bound = 0.0;
  bool feasible = false;

  static TheoremInstance measure(attention::AttentionLogits logits, std::vector<double> values,
                                 spectral::Window window, std::size_t k_threshold, double eta);

  /// Empty when feasible, otherwise the violated inequality.
  std::string infeasibility() const;
};

struct TauRow {
  double e_x = 0.0;
  double e_y = 0.0;
  std::optional<double> ratio;  // empty when E(x, tau) < kErrorFloor
};

struct TheoremReport {
  std::size_t frames = 0;
  double eta = 0.0;
  double kappa_hat = 0.0;
  double a_min = 0.0;
  double homogeneity = 0.0;
  double value_bound = 0.0;
  double alpha = 0.0;
  double iota = 0.0;
  double lambda_coef = 0.0;
  double identity_residual = 0.0;  // |iota + kappa lambda - eta|
  double error_floor = 0.0;        // min_tau E(x, tau)
  std::vector<TauRow> per_tau;
  double max_ratio = 0.0;
  double slack = 0.0;
  double kappa_after = 0.0;  // kappa measured on y, diagnostic only
  bool pass = false;
};

TheoremReport verify_theorem(const TheoremInstance& instance);

}  // namespace tiara::verifier
