#pragma once
// Discrete Fourier and short-time Fourier transforms over periodic signals.
//
// Transforms use direct summation through the SIMD dft_bin kernel; twiddle
// indices are reduced modulo N in integers before the table lookup.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace tiara::spectral {

/// Finite real sequence of length N >= 1, indexed periodically.
class Signal {
 public:
  explicit Signal(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t n) const noexcept { return values_[n]; }
  /// x_{n mod N} for any integer n.
  double at(std::int64_t n) const noexcept;
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::vector<double> values_;
};

enum class WindowKind { kRectangular, kHann, kGaussian, kBlackman };

std::string_view window_kind_name(WindowKind kind) noexcept;
WindowKind parse_window_kind(std::string_view name);

inline constexpr double kGaussianSigma = 0.4;

/// Window coefficients. Coefficient j multiplies sample m + j - floor(L/2)
/// when the window is placed at shift m.
struct Window {
  WindowKind kind = WindowKind::kRectangular;
  std::vector<double> coefficients;

  std::size_t length() const noexcept { return coefficients.size(); }
  std::int64_t half() const noexcept { return static_cast<std::int64_t>(length() / 2); }

  friend bool operator==(const Window&, const Window&) = default;
};

Window make_window(WindowKind kind, std::size_t length);
Window make_window(std::string_view kind, std::size_t length);

/// cos/sin of 2*pi*q/N for q in [0, N).
class Twiddles {
 public:
  explicit Twiddles(std::size_t period);
  std::size_t period() const noexcept { return cos_.size(); }
  const double* cos_table() const noexcept { return cos_.data(); }
  const double* sin_table() const noexcept { return sin_.data(); }

 private:
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Sum_n x_n exp(-i 2 pi k n / N), 0 <= k < N.
std::complex<double> dft(const Signal& x, std::size_t k);

/// All N bins.
std::vector<std::complex<double>> dft_all(const Signal& x);

/// The length-N sequence x_n * psi_{n-m} with the window wrapped periodically.
std::vector<double> windowed(const Signal& x, const Window& w, std::int64_t m);

/// Sum_n x_n psi_{n-m} exp(-i 2 pi k n / N), 0 <= k < N, any integer m.
std::complex<double> dstft(const Signal& x, const Window& w, std::int64_t m, std::size_t k);

/// DSTFT bins k in [first, last) at shift m.
std::vector<std::complex<double>> dstft_bins(const Signal& x, const Window& w, std::int64_t m,
                                             std::size_t first, std::size_t last);

/// Prepend x_{N-left..N-1} and append x_{0..right-1}, wrapping as often as needed.
Signal pad_periodic(const Signal& x, std::size_t left, std::size_t right);

/// Full (shift, frequency) DSTFT table of a signal.
class Spectrogram {
 public:
  static Spectrogram compute(const Signal& x, const Window& w);

  std::size_t signal_length() const noexcept { return n_; }
  const Window& window() const noexcept { return window_; }
  std::complex<double> at(std::size_t m, std::size_t k) const noexcept {
    return coefficients_[m * n_ + k];
  }

 private:
  Spectrogram(std::size_t n, Window w, std::vector<std::complex<double>> c)
      : n_(n), window_(std::move(w)), coefficients_(std::move(c)) {}

  std::size_t n_;
  Window window_;
  std::vector<std::complex<double>> coefficients_;
};

}  // namespace tiara::spectral
