#include "tiara/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tiara/errors.hpp"
#include "tiara/simd/kernels.hpp"

namespace tiara::spectral {
namespace {

std::size_t wrap(std::int64_t n, std::size_t period) noexcept {
  const auto p = static_cast<std::int64_t>(period);
  std::int64_t r = n % p;
  if (r < 0) r += p;
  return static_cast<std::size_t>(r);
}

void check_bin(std::size_t k, std::size_t n) {
  if (k >= n)
    throw DomainError("frequency index " + std::to_string(k) + " out of range [0, " +
                      std::to_string(n) + ")");
}

std::complex<double> bin(std::span<const double> z, const Twiddles& tw, std::size_t k) {
  double re = 0.0;
  double im = 0.0;
  simd::active().dft_bin(z.data(), z.size(), tw.cos_table(), tw.sin_table(), tw.period(), k, &re,
                         &im);
  return {re, im};
}

}  // namespace

Signal::Signal(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("signal must have at least one sample");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw DomainError("signal sample " + std::to_string(i) + " is not finite");
}

double Signal::at(std::int64_t n) const noexcept { return values_[wrap(n, values_.size())]; }

std::string_view window_kind_name(WindowKind kind) noexcept {
  switch (kind) {
    case WindowKind::kRectangular:
      return "rectangular";
    case WindowKind::kHann:
      return "hann";
    case WindowKind::kGaussian:
      return "gaussian";
    case WindowKind::kBlackman:
      return "blackman";
  }
  return "unknown";
}

WindowKind parse_window_kind(std::string_view name) {
  for (WindowKind k : {WindowKind::kRectangular, WindowKind::kHann, WindowKind::kGaussian,
                       WindowKind::kBlackman})
    if (name == window_kind_name(k)) return k;
  throw DomainError("unknown window kind '" + std::string(name) + "'");
}

Window make_window(WindowKind kind, std::size_t length) {
  if (length == 0) throw DomainError("window length must be >= 1");
  Window w{kind, std::vector<double>(length, 1.0)};
  if (length == 1 || kind == WindowKind::kRectangular) return w;

  using std::numbers::pi;
  const double span = static_cast<double>(length - 1);
  auto value = [&](std::size_t j) {
    const double t = static_cast<double>(j);
    switch (kind) {
      case WindowKind::kHann:
        return 0.5 - 0.5 * std::cos(2.0 * pi * t / span);
      case WindowKind::kBlackman:
        return 0.42 - 0.5 * std::cos(2.0 * pi * t / span) + 0.08 * std::cos(4.0 * pi * t / span);
      case WindowKind::kGaussian: {
        const double u = (t - span / 2.0) / (kGaussianSigma * span / 2.0);
        return std::exp(-0.5 * u * u);
      }
      case WindowKind::kRectangular:
        break;
    }
    return 1.0;
  };
  // Evaluate the left half and mirror it so coeff[j] == coeff[L-1-j] exactly.
  for (std::size_t j = 0; j <= (length - 1) / 2; ++j) {
    const double c = std::clamp(value(j), 0.0, 1.0);
    w.coefficients[j] = c;
    w.coefficients[length - 1 - j] = c;
  }
  return w;
}

Window make_window(std::string_view kind, std::size_t length) {
  return make_window(parse_window_kind(kind), length);
}

Twiddles::Twiddles(std::size_t period) : cos_(period), sin_(period) {
  if (period == 0) throw DomainError("twiddle period must be >= 1");
  using std::numbers::pi;
  for (std::size_t q = 0; q < period; ++q) {
    const double angle = 2.0 * pi * static_cast<double>(q) / static_cast<double>(period);
    cos_[q] = std::cos(angle);
    sin_[q] = std::sin(angle);
  }
}

std::complex<double> dft(const Signal& x, std::size_t k) {
  check_bin(k, x.size());
  return bin(x.values(), Twiddles(x.size()), k);
}

std::vector<std::complex<double>> dft_all(const Signal& x) {
  const Twiddles tw(x.size());
  std::vector<std::complex<double>> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = bin(x.values(), tw, k);
  return out;
}

std::vector<double> windowed(const Signal& x, const Window& w, std::int64_t m) {
  const std::size_t n = x.size();
  std::vector<double> z(n, 0.0);
  std::vector<double> weight(n, 0.0);
  const std::int64_t start = m - w.half();
  for (std::size_t j = 0; j < w.length(); ++j)
    weight[wrap(start + static_cast<std::int64_t>(j), n)] += w.coefficients[j];
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * weight[i];
  return z;
}

std::complex<double> dstft(const Signal& x, const Window& w, std::int64_t m, std::size_t k) {
  check_bin(k, x.size());
  return bin(windowed(x, w, m), Twiddles(x.size()), k);
}

std::vector<std::complex<double>> dstft_bins(const Signal& x, const Window& w, std::int64_t m,
                                             std::size_t first, std::size_t last) {
  if (first > last || last > x.size())
    throw DomainError("frequency range [" + std::to_string(first) + ", " + std::to_string(last) +
                      ") outside [0, " + std::to_string(x.size()) + "]");
  const auto z = windowed(x, w, m);
  const Twiddles tw(x.size());
  std::vector<std::complex<double>> out;
  out.reserve(last - first);
  for (std::size_t k = first; k < last; ++k) out.push_back(bin(z, tw, k));
  return out;
}

Signal pad_periodic(const Signal& x, std::size_t left, std::size_t right) {
  const std::size_t n = x.size();
  std::vector<double> out;
  out.reserve(n + left + right);
  const auto l = static_cast<std::int64_t>(left);
  for (std::int64_t i = -l; i < static_cast<std::int64_t>(n + right); ++i) out.push_back(x.at(i));
  return Signal(std::move(out));
}

Spectrogram Spectrogram::compute(const Signal& x, const Window& w) {
  const std::size_t n = x.size();
  const Twiddles tw(n);
  std::vector<std::complex<double>> c(n * n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto z = windowed(x, w, static_cast<std::int64_t>(m));
    for (std::size_t k = 0; k < n; ++k) c[m * n + k] = bin(z, tw, k);
  }
  return Spectrogram(n, w, std::move(c));
}

}  // namespace tiara::spectral
