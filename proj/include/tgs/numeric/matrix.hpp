#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace tgs {

using Index = std::size_t;

/// Row-major dense matrix of doubles. Vectors are 1×n or n×1 matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(Index rows, Index cols, double fill = 0.0);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(Index r, Index c) { return data_[r * cols_ + c]; }
  double operator()(Index r, Index c) const { return data_[r * cols_ + c]; }

  std::span<double> row(Index r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(Index r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void fill(double value);
  bool all_finite() const;
  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  Matrix transposed() const;
  /// Rows picked by index, in the given order.
  Matrix gather_rows(std::span<const Index> indices) const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

/// Throws NumericError naming `where` if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view where);
/// Throws DimensionError unless a and b have identical shapes.
void require_same_shape(const Matrix& a, const Matrix& b, std::string_view where);

}  // namespace tgs
