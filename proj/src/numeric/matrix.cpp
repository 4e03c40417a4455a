#include "tgs/numeric/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tgs/error.hpp"

namespace tgs {

Matrix::Matrix(Index rows, Index cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const Index r = rows.size();
  const Index c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("Matrix::from_rows: ragged rows");
    std::copy(row.begin(), row.end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * c));
    ++i;
  }
  return m;
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::gather_rows(std::span<const Index> indices) const {
  Matrix out(indices.size(), cols_);
  for (Index k = 0; k < indices.size(); ++k) {
    if (indices[k] >= rows_) throw DimensionError("Matrix::gather_rows: row index out of range");
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(indices[k] * cols_), cols_,
                out.data_.begin() + static_cast<std::ptrdiff_t>(k * cols_));
  }
  return out;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "Matrix::operator+=");
  for (Index k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "Matrix::operator-=");
  for (Index k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

void require_finite(const Matrix& m, std::string_view where) {
  if (!m.all_finite()) throw NumericError("non-finite value in " + std::string(where));
}

void require_same_shape(const Matrix& a, const Matrix& b, std::string_view where) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(where) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

}  // namespace tgs
