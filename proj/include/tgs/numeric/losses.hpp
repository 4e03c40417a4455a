#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tgs/numeric/matrix.hpp"

namespace tgs {

using Label = std::int32_t;

/// Row i ↦ Σ_c (a[i][c] − b[i][c])². Throws DimensionError on shape mismatch.
std::vector<double> mse_rowpair(const Matrix& a, const Matrix& b);

/// Gradient of Σ_i weight[i]·‖a_i − b_i‖² with respect to a (the gradient
/// with respect to b is its negation).
Matrix mse_rowpair_backward(const Matrix& a, const Matrix& b, std::span<const double> row_weights);

struct CrossEntropyResult {
  double loss = 0.0;  // mean over rows of −log softmax(logits)[label]
  Matrix grad;        // (softmax − onehot) / n
};

/// Throws DimensionError when labels.size() != rows or a label lies outside [0, C).
CrossEntropyResult cross_entropy(const Matrix& logits, std::span<const Label> labels);

/// −log softmax(row)[label] computed through a stable log-sum-exp.
double cross_entropy_row(std::span<const double> logits, Label label);

}  // namespace tgs
