#pragma once

#include <optional>

#include "tgs/numeric/matrix.hpp"
#include "tgs/numeric/rng.hpp"

namespace tgs {

// ---------------------------------------------------------------------------
// Dense products (Eigen-backed, single threaded)
// ---------------------------------------------------------------------------

/// a · b
Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ · b
Matrix matmul_at_b(const Matrix& a, const Matrix& b);
/// a · bᵀ
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

/// Adds the 1×cols row vector `bias` to every row of m.
void add_row_vector(Matrix& m, const Matrix& bias);
/// 1×cols vector of column sums.
Matrix column_sums(const Matrix& m);

// ---------------------------------------------------------------------------
// Linear
// ---------------------------------------------------------------------------

/// input (n×d) · weight (d×f). Throws DimensionError on inner-dim mismatch.
Matrix linear_forward(const Matrix& input, const Matrix& weight);

struct LinearGrad {
  Matrix weight;  // d×f
  Matrix input;   // n×d, empty when not requested
};

LinearGrad linear_backward(const Matrix& input, const Matrix& weight, const Matrix& upstream,
                           bool need_input_grad = true);

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

Matrix relu(const Matrix& x);
/// Zeroes upstream where the pre-activation was <= 0.
Matrix relu_backward(const Matrix& pre_activation, const Matrix& upstream);

double sigmoid(double x);
Matrix sigmoid(const Matrix& x);

/// Row-wise softmax with row-max subtraction.
Matrix softmax_rows(const Matrix& logits);
/// Vector-Jacobian product of softmax given its output `probs`.
Matrix softmax_rows_backward(const Matrix& probs, const Matrix& upstream);

// ---------------------------------------------------------------------------
// Batch normalization
// ---------------------------------------------------------------------------

struct BatchNormState {
  Matrix running_mean;  // 1×F
  Matrix running_var;   // 1×F, >= 0
  Matrix scale;         // 1×F, trainable
  Matrix shift;         // 1×F, trainable
  double momentum = 0.1;
  double epsilon = 1e-5;

  static BatchNormState fresh(Index features, double momentum = 0.1, double epsilon = 1e-5);
};

struct BatchNormCache {
  Matrix normalized;             // x̂ before scale/shift
  std::vector<double> inv_std;   // 1/√(σ²_B + ε) per column
  std::vector<double> batch_mean;
  std::vector<double> batch_var;
};

/// Training mode normalizes with batch statistics and updates the running
/// averages in `state`; eval mode reads the running statistics only.
/// `cache` is filled in training mode when non-null.
Matrix batchnorm_forward(const Matrix& input, BatchNormState& state, bool training,
                         BatchNormCache* cache = nullptr);
/// Eval-mode forward that never touches running statistics.
Matrix batchnorm_eval(const Matrix& input, const BatchNormState& state);

struct BatchNormGrad {
  Matrix input;
  Matrix scale;
  Matrix shift;
};

/// Backward through a training-mode forward.
BatchNormGrad batchnorm_backward(const BatchNormCache& cache, const BatchNormState& state,
                                 const Matrix& upstream);

// ---------------------------------------------------------------------------
// Dropout (inverted)
// ---------------------------------------------------------------------------

struct DropoutResult {
  Matrix output;
  Matrix mask;  // entries in {0, 1/(1-p)}
};

/// Throws NumericError for p outside [0, 1).
DropoutResult dropout_forward(const Matrix& input, double p, Rng& rng, bool training);
Matrix dropout_backward(const Matrix& mask, const Matrix& upstream);

// ---------------------------------------------------------------------------
// Per-layer cache used by the backbone backward pass
// ---------------------------------------------------------------------------

/// Exists only for layers forwarded in training mode.
struct LayerCache {
  Matrix input;           // H^(l); empty for the sparse input layer
  Matrix pre_activation;  // H^(l) W^(l)
  BatchNormCache norm;
  Matrix dropout_mask;
};

}  // namespace tgs
