#pragma once

#include <string>
#include <vector>

#include "tgs/numeric/layers.hpp"
#include "tgs/numeric/matrix.hpp"
#include "tgs/numeric/rng.hpp"

namespace tgs {

struct ModelShape {
  Index input_dim = 0;    // d
  Index hidden_dim = 0;   // F
  Index num_classes = 0;  // C
  Index num_layers = 2;   // L

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

struct ParamRef {
  std::string name;
  Matrix* value;
};

struct ConstParamRef {
  std::string name;
  const Matrix* value;
};

/// Glorot-uniform initialized matrix (fan_in = rows, fan_out = cols).
Matrix glorot_uniform(Index rows, Index cols, Rng& rng);

/// Trainable state of the self-distilled MLP.
///
///   backbone[l]   W^(l): d×F for l = 0, F×F afterwards (no bias; BN shifts)
///   norms[l]      batch norm after each layer's ReLU
///   head_f/bias_f classification head, F×C and 1×C (kept for inference)
///   head_g/bias_g distillation head, F×C and 1×C (training only)
///   mix_proj      W_m, d×F, projects raw features for the mixup gate
///   attention     a, 2F×1, scores the concatenated projections
struct TgsParams {
  ModelShape shape;
  std::vector<Matrix> backbone;
  std::vector<BatchNormState> norms;
  Matrix head_f;
  Matrix bias_f;
  Matrix head_g;
  Matrix bias_g;
  Matrix mix_proj;
  Matrix attention;

  /// Throws ConfigError on a degenerate shape.
  static TgsParams init(const ModelShape& shape, Rng& rng, double bn_momentum = 0.1, double bn_epsilon = 1e-5);

  /// Same layout, every matrix zero. Used as the gradient buffer.
  TgsParams zeros_like() const;

  /// Trainable matrices in a fixed order (Adam and checkpoints rely on it).
  std::vector<ParamRef> trainable();
  std::vector<ConstParamRef> trainable() const;
  /// Non-trainable batch-norm running statistics.
  std::vector<ParamRef> buffers();
  std::vector<ConstParamRef> buffers() const;

  bool all_finite() const;
};

}  // namespace tgs
