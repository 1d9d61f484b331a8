#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "tiara/matrix.hpp"

namespace fixture {

inline tiara::Matrix to_matrix(const oracle::Mat& m) {
  tiara::Matrix out(m.size(), m.empty() ? 0 : m[0].size());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = m[i][j];
  return out;
}

inline oracle::Mat to_rows(const tiara::Matrix& m) {
  oracle::Mat out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

inline double max_abs_diff(const tiara::Matrix& a, const oracle::Mat& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::fabs(a(i, j) - b[i][j]));
  return worst;
}

/// |got - want| relative to max(|want|, scale).
inline double rel_error(std::complex<double> got, oracle::cld want, long double scale) {
  const long double err = std::abs(oracle::cld(got.real(), got.imag()) - want);
  return static_cast<double>(err / std::max(std::abs(want), scale));
}

}  // namespace fixture
