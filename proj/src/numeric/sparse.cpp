#include "tgs/numeric/sparse.hpp"

#include <cmath>

#include "tgs/error.hpp"

namespace tgs {

SparseRows SparseRows::from_dense(const Matrix& dense) {
  SparseRows s;
  s.cols_ = dense.cols();
  s.row_ptr_.reserve(dense.rows() + 1);
  for (Index i = 0; i < dense.rows(); ++i) {
    const auto row = dense.row(i);
    for (Index j = 0; j < row.size(); ++j) {
      if (row[j] != 0.0) {
        s.col_idx_.push_back(static_cast<std::uint32_t>(j));
        s.values_.push_back(row[j]);
      }
    }
    s.row_ptr_.push_back(s.values_.size());
  }
  return s;
}

SparseRows SparseRows::gather(std::span<const Index> rows) const {
  SparseRows s;
  s.cols_ = cols_;
  s.row_ptr_.reserve(rows.size() + 1);
  for (Index r : rows) {
    if (r >= this->rows()) throw DimensionError("SparseRows::gather: row index out of range");
    const auto idx = row_indices(r);
    const auto val = row_values(r);
    s.col_idx_.insert(s.col_idx_.end(), idx.begin(), idx.end());
    s.values_.insert(s.values_.end(), val.begin(), val.end());
    s.row_ptr_.push_back(s.values_.size());
  }
  return s;
}

Matrix SparseRows::to_dense() const {
  Matrix m(rows(), cols_);
  for (Index i = 0; i < rows(); ++i) {
    const auto idx = row_indices(i);
    const auto val = row_values(i);
    for (Index k = 0; k < idx.size(); ++k) m(i, idx[k]) = val[k];
  }
  return m;
}

SparseRows SparseRows::row_normalized() const {
  SparseRows s = *this;
  for (Index i = 0; i < rows(); ++i) {
    auto val = s.mutable_row_values(i);
    double total = 0.0;
    for (double v : val) total += std::abs(v);
    if (total == 0.0) continue;
    for (double& v : val) v /= total;
  }
  return s;
}

Matrix sparse_matmul(const SparseRows& x, const Matrix& w) {
  if (x.cols() != w.rows()) {
    throw DimensionError("sparse_matmul: inner dimension mismatch (" + std::to_string(x.cols()) + " vs " +
                         std::to_string(w.rows()) + ")");
  }
  Matrix out(x.rows(), w.cols());
  const Index f = w.cols();
  for (Index i = 0; i < x.rows(); ++i) {
    double* dst = out.data() + i * f;
    const auto idx = x.row_indices(i);
    const auto val = x.row_values(i);
    for (Index k = 0; k < idx.size(); ++k) {
      const double* src = w.data() + static_cast<Index>(idx[k]) * f;
      const double v = val[k];
      for (Index j = 0; j < f; ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

void sparse_matmul_at_b_accumulate(const SparseRows& x, const Matrix& g, Matrix& out) {
  if (x.rows() != g.rows() || out.rows() != x.cols() || out.cols() != g.cols()) {
    throw DimensionError("sparse_matmul_at_b_accumulate: shape mismatch");
  }
  const Index f = g.cols();
  for (Index i = 0; i < x.rows(); ++i) {
    const double* src = g.data() + i * f;
    const auto idx = x.row_indices(i);
    const auto val = x.row_values(i);
    for (Index k = 0; k < idx.size(); ++k) {
      double* dst = out.data() + static_cast<Index>(idx[k]) * f;
      const double v = val[k];
      for (Index j = 0; j < f; ++j) dst[j] += v * src[j];
    }
  }
}

}  // namespace tgs
