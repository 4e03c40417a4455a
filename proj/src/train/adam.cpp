#include "tgs/train/adam.hpp"

#include <cmath>

#include "tgs/error.hpp"

namespace tgs {

AdamState AdamState::for_params(const std::vector<ParamRef>& params) {
  AdamState s;
  for (const auto& p : params) {
    s.first.emplace_back(p.value->rows(), p.value->cols());
    s.second.emplace_back(p.value->rows(), p.value->cols());
  }
  return s;
}

void adam_step(const std::vector<ParamRef>& params, const std::vector<ConstParamRef>& grads, AdamState& state,
               double lr, double weight_decay, WeightDecay mode) {
  if (params.size() != grads.size() || params.size() != state.first.size()) {
    throw DimensionError("adam_step: parameter, gradient and state counts differ");
  }
  for (Index k = 0; k < params.size(); ++k) {
    require_same_shape(*params[k].value, *grads[k].value, "adam_step " + params[k].name);
    if (!grads[k].value->all_finite()) throw NumericError("non-finite gradient in " + params[k].name);
  }

  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const double b1 = state.beta1, b2 = state.beta2, eps = state.epsilon;
  const double step_size = lr / c1;
  const double inv_c2 = 1.0 / c2;
  const double coupled = mode == WeightDecay::Coupled ? weight_decay : 0.0;
  const double shrink = mode == WeightDecay::Decoupled ? 1.0 - lr * weight_decay : 1.0;
  for (Index k = 0; k < params.size(); ++k) {
    double* __restrict theta = params[k].value->data();
    const double* __restrict g = grads[k].value->data();
    double* __restrict m = state.first[k].data();
    double* __restrict v = state.second[k].data();
    const Index n = params[k].value->size();
    for (Index i = 0; i < n; ++i) {
      const double gi = g[i] + coupled * theta[i];
      m[i] = b1 * m[i] + (1.0 - b1) * gi;
      v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
      theta[i] = shrink * theta[i] - step_size * m[i] / (std::sqrt(v[i] * inv_c2) + eps);
    }
  }
}

}  // namespace tgs
