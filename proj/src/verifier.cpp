#include "tiara/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "tiara/consistency.hpp"
#include "tiara/errors.hpp"

namespace tiara::verifier {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementation.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Matrix column(const std::vector<double>& v) { return Matrix(v.size(), 1, v); }

}  // namespace

double iota(double alpha, double a) {
  const double keep = std::exp(-alpha);
  return keep / (1.0 - (1.0 - keep) * a);
}

double lambda_coef(double alpha, double a) {
  const double drop = -std::expm1(-alpha);
  return drop / (1.0 - drop * a);
}

double alpha_from_closed_form(double kappa, double eta, double a_min) {
  if (!(a_min >= 0.0 && a_min < 1.0))
    throw InfeasibleError("a_min = " + fmt(a_min) + " must lie in [0, 1)");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw InfeasibleError("kappa = " + fmt(kappa) + " must be finite and >= 0");
  if (!(eta > 0.0 && eta < 1.0)) throw InfeasibleError("eta = " + fmt(eta) + " must lie in (0, 1)");
  if (!(kappa < 1.0 - a_min))
    throw InfeasibleError("kappa < 1 - a_min violated: kappa = " + fmt(kappa) +
                          ", 1 - a_min = " + fmt(1.0 - a_min));
  const double denominator = eta * (1.0 - a_min) - kappa;
  if (!(denominator > kAlphaDenominatorFloor))
    throw InfeasibleError("eta >= kappa / (1 - a_min) violated: eta * (1 - a_min) - kappa = " +
                          fmt(denominator) + " <= " + fmt(kAlphaDenominatorFloor));
  const double numerator = 1.0 - kappa - a_min * eta;
  if (!(numerator > 0.0))
    throw InfeasibleError("1 - kappa - a_min * eta > 0 violated: value = " + fmt(numerator));
  return std::log(numerator / denominator);
}

double slack_for(std::size_t frames) noexcept { return frames >= 128 ? 0.05 : 0.15; }

attention::AttentionLogits gen_homogeneous_attention(std::size_t frames, double decay) {
  if (frames < 2) throw DomainError("homogeneous attention needs N >= 2");
  if (!(decay >= 0.0) || !std::isfinite(decay))
    throw DomainError("decay must be finite and >= 0");
  Matrix s(frames, frames);
  for (std::size_t i = 0; i < frames; ++i)
    for (std::size_t j = 0; j < frames; ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      const std::size_t d = std::min(gap, frames - gap);
      s(i, j) = std::exp(-decay * static_cast<double>(d));
    }
  return attention::AttentionLogits(std::move(s));
}

std::vector<double> gen_inconsistent_values(std::size_t frames, double bound, double hf_amplitude,
                                            std::uint64_t seed, std::optional<std::size_t> hf_bin) {
  if (frames < 2) throw DomainError("value vector needs N >= 2");
  if (!(hf_amplitude > 0.0 && hf_amplitude <= bound) || !std::isfinite(bound))
    throw DomainError("need 0 < hf_amplitude <= bound, got hf_amplitude = " + fmt(hf_amplitude) +
                      ", bound = " + fmt(bound));
  const std::size_t bin = hf_bin.value_or(frames / 2);
  if (bin < 1 || bin > frames / 2)
    throw DomainError("high-frequency bin " + std::to_string(bin) + " outside [1, floor(N/2)]");

  std::mt19937_64 rng(seed);
  const double carrier_freq = unit(rng) < 0.5 ? 1.0 : 2.0;
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  const double carrier_amp = bound - hf_amplitude;
  const auto n_d = static_cast<double>(frames);

  std::vector<double> v(frames);
  for (std::size_t n = 0; n < frames; ++n) {
    double tone;
    if (2 * bin == frames) {
      tone = n % 2 == 0 ? 1.0 : -1.0;
    } else {
      const auto q = static_cast<double>((bin * n) % frames);
      tone = std::cos(2.0 * std::numbers::pi * q / n_d);
    }
    const double carrier =
        carrier_amp * std::cos(2.0 * std::numbers::pi * carrier_freq * static_cast<double>(n) / n_d +
                               phase);
    v[n] = std::clamp(carrier + hf_amplitude * tone, -bound, bound);
  }
  return v;
}

TheoremInstance TheoremInstance::measure(attention::AttentionLogits logits,
                                         std::vector<double> values, spectral::Window window,
                                         std::size_t k_threshold, double eta) {
  if (values.size() != logits.frames())
    throw DomainError("value vector length " + std::to_string(values.size()) +
                      " does not match N = " + std::to_string(logits.frames()));
  attention::AttentionMap a = attention::softmax_rows(logits);
  const Matrix dyn = consistency::dynamic_component(a);
  const spectral::Signal x(multiply(a.matrix(), values));
  const spectral::Signal x_dyn(multiply(dyn, values));

  TheoremInstance inst{std::move(logits), std::move(a), std::move(values), std::move(window),
                       k_threshold, eta};
  inst.kappa_hat = consistency::estimate_kappa(x, x_dyn, inst.window, k_threshold);
  inst.a_min = 1.0;
  for (std::size_t i = 0; i < inst.attention.frames(); ++i)
    inst.a_min = std::min(inst.a_min, inst.attention(i, i));
  inst.homogeneity = consistency::homogeneity_deviation(inst.attention.matrix());
  for (double v : inst.values) inst.value_bound = std::max(inst.value_bound, std::abs(v));
  inst.feasible = inst.eta > 0.0 && inst.eta < 1.0 && inst.kappa_hat < 1.0 - inst.a_min &&
                  inst.eta >= inst.kappa_hat / (1.0 - inst.a_min);
  return inst;
}

std::string TheoremInstance::infeasibility() const {
  if (!(eta > 0.0 && eta < 1.0)) return "eta = " + fmt(eta) + " must lie in (0, 1)";
  if (!(kappa_hat < 1.0 - a_min))
    return "kappa < 1 - a_min violated: kappa_hat = " + fmt(kappa_hat) +
           ", 1 - a_min = " + fmt(1.0 - a_min);
  if (!(eta >= kappa_hat / (1.0 - a_min)))
    return "eta >= kappa / (1 - a_min) violated: eta = " + fmt(eta) +
           ", kappa_hat / (1 - a_min) = " + fmt(kappa_hat / (1.0 - a_min));
  return {};
}

TheoremReport verify_theorem(const TheoremInstance& inst) {
  if (!inst.feasible) throw InfeasibleError("infeasible instance: " + inst.infeasibility());
  const std::size_t n = inst.attention.frames();

  TheoremReport r;
  r.frames = n;
  r.eta = inst.eta;
  r.kappa_hat = inst.kappa_hat;
  r.a_min = inst.a_min;
  r.homogeneity = inst.homogeneity;
  r.value_bound = inst.value_bound;
  r.alpha = alpha_from_closed_form(inst.kappa_hat, inst.eta, inst.a_min);
  r.iota = iota(r.alpha, inst.a_min);
  r.lambda_coef = lambda_coef(r.alpha, inst.a_min);
  r.identity_residual = std::abs(r.iota + inst.kappa_hat * r.lambda_coef - inst.eta);
  r.slack = slack_for(n);

  attention::ReweightMatrix lam{Matrix(n, n), r.alpha, 0, 0.0};
  for (std::size_t i = 0; i < n; ++i) lam.lambda(i, i) = -r.alpha;
  const attention::VideoLatentSlice v(column(inst.values));
  const auto reweighted = attention::reweighted_attention(inst.logits, lam, v);

  const spectral::Signal x(multiply(inst.attention.matrix(), inst.values));
  const auto out = reweighted.output.values().data();
  const spectral::Signal y(std::vector<double>(out.begin(), out.end()));

  const auto ex = consistency::inconsistency_profile(x, inst.window, inst.k_threshold);
  const auto ey = consistency::inconsistency_profile(y, inst.window, inst.k_threshold);
  r.error_floor = ex.floor();
  if (ex.peak() < kErrorFloor)
    throw DomainError("x has no high-frequency inconsistency: E(x, tau) < " + fmt(kErrorFloor) +
                      " at every shift");

  r.per_tau.resize(n);
  for (std::size_t tau = 0; tau < n; ++tau) {
    TauRow& row = r.per_tau[tau];
    row.e_x = ex.per_tau[tau];
    row.e_y = ey.per_tau[tau];
    if (row.e_x >= kErrorFloor) {
      row.ratio = row.e_y / row.e_x;
      r.max_ratio = std::max(r.max_ratio, *row.ratio);
    }
  }

  const spectral::Signal y_dyn(
      multiply(consistency::dynamic_component(reweighted.attention), inst.values));
  r.kappa_after = consistency::estimate_kappa(y, y_dyn, inst.window, inst.k_threshold);
  r.pass = r.max_ratio <= inst.eta + r.slack;
  return r;
}

}  // namespace tiara::verifier
