#include "tiara/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tiara/errors.hpp"

namespace tiara::consistency {
namespace {

void check_threshold(std::size_t k_threshold, std::size_t n) {
  if (k_threshold < 1 || k_threshold > n / 2)
    throw DomainError("frequency threshold k_t=" + std::to_string(k_threshold) +
                      " outside [1, floor(N/2)] = [1, " + std::to_string(n / 2) + "]");
}

}  // namespace

double inconsistency_error(const spectral::Signal& x, const spectral::Window& w, std::int64_t tau,
                           std::size_t k_threshold) {
  check_threshold(k_threshold, x.size());
  double total = 0.0;
  for (const auto& c : spectral::dstft_bins(x, w, tau, k_threshold, x.size() / 2 + 1))
    total += std::abs(c);
  return total;
}

double InconsistencyReport::floor() const noexcept {
  return per_tau.empty() ? 0.0 : *std::min_element(per_tau.begin(), per_tau.end());
}

double InconsistencyReport::peak() const noexcept {
  return per_tau.empty() ? 0.0 : *std::max_element(per_tau.begin(), per_tau.end());
}

std::vector<double> high_band_magnitudes(const spectral::Signal& x, const spectral::Window& w,
                                         std::size_t k_threshold) {
  check_threshold(k_threshold, x.size());
  const std::size_t n = x.size();
  const std::size_t last = n / 2 + 1;
  std::vector<double> out;
  out.reserve(n * (last - k_threshold));
  for (std::size_t tau = 0; tau < n; ++tau)
    for (const auto& c : spectral::dstft_bins(x, w, static_cast<std::int64_t>(tau), k_threshold, last))
      out.push_back(std::abs(c));
  return out;
}

InconsistencyReport inconsistency_profile(const spectral::Signal& x, const spectral::Window& w,
                                          std::size_t k_threshold) {
  const auto mags = high_band_magnitudes(x, w, k_threshold);
  const std::size_t n = x.size();
  const std::size_t width = n / 2 + 1 - k_threshold;
  InconsistencyReport report{std::vector<double>(n, 0.0), k_threshold, w};
  for (std::size_t tau = 0; tau < n; ++tau)
    for (std::size_t k = 0; k < width; ++k) report.per_tau[tau] += mags[tau * width + k];
  return report;
}

Matrix dynamic_component(const attention::AttentionMap& a) {
  Matrix out = a.matrix();
  for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) = 0.0;
  return out;
}

double estimate_kappa(const spectral::Signal& x, const spectral::Signal& x_dyn,
                      const spectral::Window& w, std::size_t k_threshold) {
  if (x.size() != x_dyn.size())
    throw DomainError("signal lengths differ: " + std::to_string(x.size()) + " vs " +
                      std::to_string(x_dyn.size()));
  const auto full = high_band_magnitudes(x, w, k_threshold);
  const auto dyn = high_band_magnitudes(x_dyn, w, k_threshold);
  double kappa = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i)
    if (full[i] >= kRatioFloor) kappa = std::max(kappa, dyn[i] / full[i]);
  return kappa;
}

double homogeneity_deviation(const Matrix& a) {
  if (!a.is_square()) throw DomainError("homogeneity deviation needs a square matrix");
  const std::size_t n = a.rows();
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double lo = a(0, k % n);
    double hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
      const double v = a(i, (i + k) % n);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

}  // namespace tiara::consistency
