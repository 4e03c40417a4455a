#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tgs/numeric/matrix.hpp"

namespace tgs {

/// Compressed-row storage for node feature rows.
///
/// Bag-of-words style features are >98% zeros; the input projection of the
/// backbone and the mixup projection read them through this form.
class SparseRows {
 public:
  SparseRows() : row_ptr_{0} {}

  static SparseRows from_dense(const Matrix& dense);

  Index rows() const { return row_ptr_.size() - 1; }
  Index cols() const { return cols_; }
  Index nonzeros() const { return values_.size(); }

  std::span<const std::uint32_t> row_indices(Index r) const {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(Index r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<double> mutable_row_values(Index r) {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  /// Rows picked by index, in the given order.
  SparseRows gather(std::span<const Index> rows) const;
  Matrix to_dense() const;
  /// Scales each row to unit L1 norm; all-zero rows stay zero.
  SparseRows row_normalized() const;

 private:
  Index cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

/// x · w for sparse x (n×d) and dense w (d×f).
Matrix sparse_matmul(const SparseRows& x, const Matrix& w);
/// out += xᵀ · g for sparse x (n×d) and dense g (n×f); out is d×f.
void sparse_matmul_at_b_accumulate(const SparseRows& x, const Matrix& g, Matrix& out);

}  // namespace tgs
