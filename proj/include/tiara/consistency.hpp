#pragma once
// High-frequency inconsistency of a frame signal and the attention-side
// quantities it is compared against.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tiara/attention.hpp"
#include "tiara/matrix.hpp"
#include "tiara/spectral.hpp"

namespace tiara::consistency {

/// Default k_t: the 5th discrete frequency bin.
inline constexpr std::size_t kDefaultThreshold = 5;

/// |DSTFT(x)| below this is treated as zero when forming ratios.
inline constexpr double kRatioFloor = 1e-12;

/// E(x, tau) = Sum_{k = k_t}^{floor(N/2)} |DSTFT(x, psi, tau, k)|.
/// Requires 1 <= k_t <= floor(N/2).
double inconsistency_error(const spectral::Signal& x, const spectral::Window& w, std::int64_t tau,
                           std::size_t k_threshold);

struct InconsistencyReport {
  std::vector<double> per_tau;  // E(x, tau) for tau in [0, N)
  std::size_t k_threshold = kDefaultThreshold;
  spectral::Window window;

  /// min over tau; the "bounded away from zero" constant.
  double floor() const noexcept;
  double peak() const noexcept;
};

InconsistencyReport inconsistency_profile(const spectral::Signal& x, const spectral::Window& w,
                                          std::size_t k_threshold);

/// Copy of the map with its diagonal zeroed. Row i sums to 1 - A_ii.
Matrix dynamic_component(const attention::AttentionMap& a);

/// max over tau in [N], k in [k_t, floor(N/2)] of |DSTFT(x_dyn)| / |DSTFT(x)|,
/// skipping terms where |DSTFT(x)| < kRatioFloor. 0 when every term is skipped.
double estimate_kappa(const spectral::Signal& x, const spectral::Signal& x_dyn,
                      const spectral::Window& w, std::size_t k_threshold);

/// max over i, j, k of |A_{i, i+k} - A_{j, j+k}| with indices mod N.
/// Zero exactly for circulant matrices.
double homogeneity_deviation(const Matrix& a);

/// One-sided magnitude table |DSTFT(x, psi, tau, k)| for k in [k_t, floor(N/2)],
/// row-major by tau.
std::vector<double> high_band_magnitudes(const spectral::Signal& x, const spectral::Window& w,
                                         std::size_t k_threshold);

}  // namespace tiara::consistency
