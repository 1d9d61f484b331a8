// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cstddef>
#include <cstdint>

#include "variants.hpp"

namespace tiara::simd::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double max_avx2(const double* a, std::size_t n) {
  if (n < 4) {
    double m = a[0];
    for (std::size_t i = 1; i < n; ++i)
      if (a[i] > m) m = a[i];
    return m;
  }
  __m256d m4 = _mm256_loadu_pd(a);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) m4 = _mm256_max_pd(m4, _mm256_loadu_pd(a + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m4);
  double m = lanes[0];
  for (int l = 1; l < 4; ++l)
    if (lanes[l] > m) m = lanes[l];
  for (; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

void divide_avx2(double* a, std::size_t n, double denom) {
  const __m256d d = _mm256_set1_pd(denom);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(a + i, _mm256_div_pd(_mm256_loadu_pd(a + i), d));
  for (; i < n; ++i) a[i] /= denom;
}

// Twiddle indices (k*j) mod period are carried in four 64-bit lanes and
// advanced by (4k) mod period per step, so table lookups stay exact.
void dft_bin_avx2(const double* x, std::size_t n, const double* cos_t, const double* sin_t,
                  std::size_t period, std::size_t k, double* re, double* im) {
  const auto p = static_cast<std::int64_t>(period);
  const auto kk = static_cast<std::int64_t>(k % period);
  std::size_t j = 0;
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  if (n >= 4) {
    __m256i idx = _mm256_setr_epi64x(0, kk, (2 * kk) % p, (3 * kk) % p);
    const __m256i step = _mm256_set1_epi64x((4 * kk) % p);
    const __m256i limit = _mm256_set1_epi64x(p - 1);
    const __m256i period_v = _mm256_set1_epi64x(p);
    for (; j + 4 <= n; j += 4) {
      const __m256d xv = _mm256_loadu_pd(x + j);
      const __m256d c = _mm256_i64gather_pd(cos_t, idx, 8);
      const __m256d s = _mm256_i64gather_pd(sin_t, idx, 8);
      acc_re = _mm256_fmadd_pd(xv, c, acc_re);
      acc_im = _mm256_fmadd_pd(xv, s, acc_im);
      idx = _mm256_add_epi64(idx, step);
      const __m256i wrap = _mm256_cmpgt_epi64(idx, limit);
      idx = _mm256_sub_epi64(idx, _mm256_and_si256(wrap, period_v));
    }
  }
  double r = hsum(acc_re);
  double s = hsum(acc_im);
  auto idx = static_cast<std::size_t>((static_cast<std::int64_t>(j) % p) * kk % p);
  for (; j < n; ++j) {
    r += x[j] * cos_t[idx];
    s += x[j] * sin_t[idx];
    idx += static_cast<std::size_t>(kk);
    if (idx >= period) idx -= period;
  }
  *re = r;
  *im = -s;
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable table{Isa::kAvx2, dot_avx2,    sum_avx2,
                                 max_avx2,   divide_avx2, dft_bin_avx2};
  return table;
}

}  // namespace tiara::simd::detail
