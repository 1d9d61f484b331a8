#pragma once
// Slow, independent reference computations for tests. Nothing here calls into
// the library; sums run in long double over naive loops.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using cld = std::complex<long double>;
using Mat = std::vector<std::vector<double>>;

inline constexpr long double kPi = std::numbers::pi_v<long double>;

inline std::int64_t wrap(std::int64_t n, std::int64_t period) {
  const auto r = n % period;
  return r < 0 ? r + period : r;
}

/// Window closed forms evaluated coefficient by coefficient.
inline std::vector<double> window(const std::string& kind, std::size_t len) {
  std::vector<double> w(len, 1.0);
  if (len == 1) return w;
  const long double d = static_cast<long double>(len - 1);
  for (std::size_t j = 0; j < len; ++j) {
    const long double t = 2 * kPi * j / d;
    if (kind == "hann") w[j] = static_cast<double>(0.5L - 0.5L * std::cos(t));
    if (kind == "blackman")
      w[j] = static_cast<double>(0.42L - 0.5L * std::cos(t) + 0.08L * std::cos(2 * t));
    if (kind == "gaussian") {
      const long double z = (j - d / 2) / (0.4L * d / 2);
      w[j] = static_cast<double>(std::exp(-0.5L * z * z));
    }
  }
  return w;
}

inline cld dft(const std::vector<double>& x, std::size_t k) {
  const auto n = x.size();
  cld acc = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const long double ang = -2 * kPi * static_cast<long double>((k * t) % n) / n;
    acc += static_cast<long double>(x[t]) * cld(std::cos(ang), std::sin(ang));
  }
  return acc;
}

/// Window weight seen by sample t when centred at m: sums every coefficient j
/// with m + j - floor(L/2) == t (mod N).
inline long double window_at(const std::vector<double>& w, std::int64_t m, std::int64_t t,
                             std::int64_t n) {
  long double s = 0;
  const auto half = static_cast<std::int64_t>(w.size() / 2);
  for (std::size_t j = 0; j < w.size(); ++j)
    if (wrap(m + static_cast<std::int64_t>(j) - half, n) == wrap(t, n)) s += w[j];
  return s;
}

inline cld dstft(const std::vector<double>& x, const std::vector<double>& w, std::int64_t m,
                 std::size_t k) {
  const auto n = static_cast<std::int64_t>(x.size());
  cld acc = 0;
  for (std::int64_t t = 0; t < n; ++t) {
    const long double ang = -2 * kPi * static_cast<long double>((k * t) % n) / n;
    acc += x[t] * window_at(w, m, t, n) * cld(std::cos(ang), std::sin(ang));
  }
  return acc;
}

/// Scale used for relative errors of a transform coefficient.
inline long double l1(const std::vector<double>& x) {
  long double s = 0;
  for (double v : x) s += std::fabs(v);
  return s;
}

/// exp/sum without max subtraction.
inline Mat softmax(const Mat& s) {
  Mat out = s;
  for (auto& row : out) {
    long double z = 0;
    for (double v : row) z += std::exp(static_cast<long double>(v));
    for (double& v : row) v = static_cast<double>(std::exp(static_cast<long double>(v)) / z);
  }
  return out;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat out(a.size(), std::vector<double>(b[0].size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b[0].size(); ++j) {
      long double s = 0;
      for (std::size_t k = 0; k < b.size(); ++k) s += static_cast<long double>(a[i][k]) * b[k][j];
      out[i][j] = static_cast<double>(s);
    }
  return out;
}

/// E(x, tau) from the naive DSTFT.
inline long double inconsistency(const std::vector<double>& x, const std::vector<double>& w,
                                 std::int64_t tau, std::size_t kt) {
  long double e = 0;
  for (std::size_t k = kt; k <= x.size() / 2; ++k) e += std::abs(dstft(x, w, tau, k));
  return e;
}

/// Exhaustive max of |DSTFT(x_dyn)| / |DSTFT(x)| over tau and the high band.
inline long double kappa(const std::vector<double>& x, const std::vector<double>& xd,
                         const std::vector<double>& w, std::size_t kt) {
  long double best = 0;
  for (std::int64_t tau = 0; tau < static_cast<std::int64_t>(x.size()); ++tau)
    for (std::size_t k = kt; k <= x.size() / 2; ++k) {
      const long double den = std::abs(dstft(x, w, tau, k));
      if (den < 1e-12L) continue;
      best = std::max(best, std::abs(dstft(xd, w, tau, k)) / den);
    }
  return best;
}

/// Motion intensity of row i written out from the definition: centre, pad
/// periodically by floor(L/2), window at i + floor(L/2), power ratio of the
/// high band [phi1, phi2) to [0, phi2). Defaults phi1 = ceil(P/8),
/// phi2 = floor(P/2) + 1.
inline double rho(const std::vector<double>& row, const std::vector<double>& w, std::size_t i,
                  long phi1 = -1, long phi2 = -1) {
  const std::size_t n = row.size(), half = w.size() / 2, p = n + 2 * half;
  long double mean = 0, peak = 0;
  for (double v : row) mean += v, peak = std::max<long double>(peak, std::fabs(v));
  mean /= n;
  std::vector<double> padded(p);
  long double dev = 0;
  for (std::size_t t = 0; t < p; ++t) {
    const auto src = wrap(static_cast<std::int64_t>(t) - static_cast<std::int64_t>(half),
                          static_cast<std::int64_t>(n));
    padded[t] = static_cast<double>(row[src] - mean);
    dev = std::max<long double>(dev, std::fabs(padded[t]));
  }
  if (dev <= 1e-12L * peak) return 0.0;
  const std::size_t lo = phi1 < 0 ? (p + 7) / 8 : static_cast<std::size_t>(phi1);
  const std::size_t hi = phi2 < 0 ? p / 2 + 1 : static_cast<std::size_t>(phi2);
  long double num = 0, den = 0;
  for (std::size_t k = 0; k < hi; ++k) {
    const long double pw = std::norm(dstft(padded, w, static_cast<std::int64_t>(i + half), k));
    den += pw;
    if (k >= lo) num += pw;
  }
  return den == 0 ? 0.0 : static_cast<double>(num / den);
}

struct Cell {
  Mat attention;
  Mat output;
};

/// Straight-line reweighting of one location: rho per row, diagonal
/// -alpha (1 - rho_i), corners -beta where |i - j| >= N - c, softmax, times V.
inline Cell reweight_location(const Mat& logits, const Mat& values, const std::vector<double>& w,
                              double alpha, std::size_t c, double beta) {
  const std::size_t n = logits.size();
  const Mat a = softmax(logits);
  Mat modified = logits;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      if (i == j) modified[i][j] += -alpha * (1.0 - rho(a[i], w, i));
      else if (c > 0 && gap + c >= n) modified[i][j] += -beta;
    }
  Cell cell;
  cell.attention = softmax(modified);
  cell.output = matmul(cell.attention, values);
  return cell;
}

// ---------------------------------------------------------------- random data

inline std::vector<double> uniform(std::mt19937_64& g, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(g);
  return v;
}

inline Mat uniform(std::mt19937_64& g, std::size_t r, std::size_t c, double lo, double hi) {
  Mat m(r);
  for (auto& row : m) row = uniform(g, c, lo, hi);
  return m;
}

}  // namespace oracle
