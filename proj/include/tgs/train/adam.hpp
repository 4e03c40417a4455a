#pragma once

#include <vector>

#include "tgs/model/params.hpp"

namespace tgs {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  std::vector<Matrix> first;   // moments, one per parameter, same shapes
  std::vector<Matrix> second;

  /// Zero moments shaped like `params`.
  static AdamState for_params(const std::vector<ParamRef>& params);
};

enum class WeightDecay {
  /// g ← g + λθ before the moment updates.
  Coupled,
  /// θ ← θ − lr·λ·θ applied outside the adaptive step.
  Decoupled,
};

/// One bias-corrected Adam update of `params` from `grads` (same order and
/// shapes). Throws NumericError naming the parameter on a non-finite
/// gradient, before anything is modified.
void adam_step(const std::vector<ParamRef>& params, const std::vector<ConstParamRef>& grads, AdamState& state,
               double lr, double weight_decay, WeightDecay mode = WeightDecay::Coupled);

}  // namespace tgs
