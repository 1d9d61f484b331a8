#include <arm_neon.h>

#include <cstddef>

#include "variants.hpp"

namespace tiara::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double max_neon(const double* a, std::size_t n) {
  if (n < 2) return a[0];
  float64x2_t m2 = vld1q_f64(a);
  std::size_t i = 2;
  for (; i + 2 <= n; i += 2) m2 = vmaxq_f64(m2, vld1q_f64(a + i));
  double m = vmaxvq_f64(m2);
  for (; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

void divide_neon(double* a, std::size_t n, double denom) {
  const float64x2_t d = vdupq_n_f64(denom);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(a + i, vdivq_f64(vld1q_f64(a + i), d));
  for (; i < n; ++i) a[i] /= denom;
}

// No gather on NEON: twiddles are fetched pairwise with scalar index math.
void dft_bin_neon(const double* x, std::size_t n, const double* cos_t, const double* sin_t,
                  std::size_t period, std::size_t k, double* re, double* im) {
  const std::size_t kk = k % period;
  float64x2_t acc_re = vdupq_n_f64(0.0);
  float64x2_t acc_im = vdupq_n_f64(0.0);
  std::size_t idx = 0;
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    std::size_t idx1 = idx + kk;
    if (idx1 >= period) idx1 -= period;
    const double c[2] = {cos_t[idx], cos_t[idx1]};
    const double s[2] = {sin_t[idx], sin_t[idx1]};
    const float64x2_t xv = vld1q_f64(x + j);
    acc_re = vfmaq_f64(acc_re, xv, vld1q_f64(c));
    acc_im = vfmaq_f64(acc_im, xv, vld1q_f64(s));
    idx = idx1 + kk;
    if (idx >= period) idx -= period;
  }
  double r = vaddvq_f64(acc_re);
  double s = vaddvq_f64(acc_im);
  for (; j < n; ++j) {
    r += x[j] * cos_t[idx];
    s += x[j] * sin_t[idx];
    idx += kk;
    if (idx >= period) idx -= period;
  }
  *re = r;
  *im = -s;
}

}  // namespace

const KernelTable& neon_table() noexcept {
  static const KernelTable table{Isa::kNeon, dot_neon,    sum_neon,
                                 max_neon,   divide_neon, dft_bin_neon};
  return table;
}

}  // namespace tiara::simd::detail
