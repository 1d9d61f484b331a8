#include "tiara/matrix.hpp"

#include <cmath>
#include <string>

#include "tiara/errors.hpp"
#include "tiara/simd/kernels.hpp"

namespace tiara {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw DomainError("matrix data size " + std::to_string(data_.size()) + " does not match " +
                      std::to_string(rows_) + "x" + std::to_string(cols_));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DomainError("matrix sum: shape mismatch");
  Matrix out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw DomainError("matrix product: inner dimensions " + std::to_string(a.cols()) + " and " +
                      std::to_string(b.rows()) + " differ");
  const Matrix bt = b.transposed();
  const auto& k = simd::active();
  Matrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < b.cols(); ++c)
      out(r, c) = k.dot(a.row(r).data(), bt.row(c).data(), a.cols());
  return out;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> v) {
  if (a.cols() != v.size()) throw DomainError("matrix-vector product: length mismatch");
  const auto& k = simd::active();
  std::vector<double> out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) out[r] = k.dot(a.row(r).data(), v.data(), v.size());
  return out;
}

}  // namespace tiara
