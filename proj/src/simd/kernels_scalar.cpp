#include <cstddef>

#include "variants.hpp"

namespace tiara::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double max_scalar(const double* a, std::size_t n) {
  double m = a[0];
  for (std::size_t i = 1; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

void divide_scalar(double* a, std::size_t n, double denom) {
  for (std::size_t i = 0; i < n; ++i) a[i] /= denom;
}

void dft_bin_scalar(const double* x, std::size_t n, const double* cos_t, const double* sin_t,
                    std::size_t period, std::size_t k, double* re, double* im) {
  double acc_re = 0.0;
  double acc_im = 0.0;
  std::size_t idx = 0;  // (k * j) mod period, kept exact in integers
  for (std::size_t j = 0; j < n; ++j) {
    acc_re += x[j] * cos_t[idx];
    acc_im -= x[j] * sin_t[idx];
    idx += k;
    if (idx >= period) idx -= period;
  }
  *re = acc_re;
  *im = acc_im;
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Isa::kScalar, dot_scalar,    sum_scalar,
                                 max_scalar,   divide_scalar, dft_bin_scalar};
  return table;
}

}  // namespace tiara::simd::detail
