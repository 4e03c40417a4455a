#include "tgs/model/params.hpp"

#include <cmath>

#include "tgs/error.hpp"

namespace tgs {

Matrix glorot_uniform(Index rows, Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(-limit, limit);
  return m;
}

TgsParams TgsParams::init(const ModelShape& shape, Rng& rng, double bn_momentum, double bn_epsilon) {
  if (shape.input_dim == 0 || shape.hidden_dim == 0 || shape.num_classes == 0 || shape.num_layers == 0) {
    throw ConfigError("model shape must have positive input, hidden, class and layer counts");
  }
  TgsParams p;
  p.shape = shape;
  for (Index l = 0; l < shape.num_layers; ++l) {
    const Index in = l == 0 ? shape.input_dim : shape.hidden_dim;
    p.backbone.push_back(glorot_uniform(in, shape.hidden_dim, rng));
    p.norms.push_back(BatchNormState::fresh(shape.hidden_dim, bn_momentum, bn_epsilon));
  }
  p.head_f = glorot_uniform(shape.hidden_dim, shape.num_classes, rng);
  p.bias_f = Matrix(1, shape.num_classes);
  p.head_g = glorot_uniform(shape.hidden_dim, shape.num_classes, rng);
  p.bias_g = Matrix(1, shape.num_classes);
  p.mix_proj = glorot_uniform(shape.input_dim, shape.hidden_dim, rng);
  p.attention = glorot_uniform(2 * shape.hidden_dim, 1, rng);
  return p;
}

TgsParams TgsParams::zeros_like() const {
  TgsParams z = *this;
  for (auto& ref : z.trainable()) ref.value->fill(0.0);
  for (auto& ref : z.buffers()) ref.value->fill(0.0);
  return z;
}

std::vector<ParamRef> TgsParams::trainable() {
  std::vector<ParamRef> refs;
  for (Index l = 0; l < backbone.size(); ++l) {
    const std::string prefix = "backbone." + std::to_string(l);
    refs.push_back({prefix + ".weight", &backbone[l]});
    refs.push_back({prefix + ".bn.scale", &norms[l].scale});
    refs.push_back({prefix + ".bn.shift", &norms[l].shift});
  }
  refs.push_back({"head_f.weight", &head_f});
  refs.push_back({"head_f.bias", &bias_f});
  refs.push_back({"head_g.weight", &head_g});
  refs.push_back({"head_g.bias", &bias_g});
  refs.push_back({"mixup.proj", &mix_proj});
  refs.push_back({"mixup.attention", &attention});
  return refs;
}

std::vector<ConstParamRef> TgsParams::trainable() const {
  std::vector<ConstParamRef> out;
  for (auto& r : const_cast<TgsParams*>(this)->trainable()) out.push_back({std::move(r.name), r.value});
  return out;
}

std::vector<ParamRef> TgsParams::buffers() {
  std::vector<ParamRef> refs;
  for (Index l = 0; l < norms.size(); ++l) {
    const std::string prefix = "backbone." + std::to_string(l) + ".bn";
    refs.push_back({prefix + ".running_mean", &norms[l].running_mean});
    refs.push_back({prefix + ".running_var", &norms[l].running_var});
  }
  return refs;
}

std::vector<ConstParamRef> TgsParams::buffers() const {
  std::vector<ConstParamRef> out;
  for (auto& r : const_cast<TgsParams*>(this)->buffers()) out.push_back({std::move(r.name), r.value});
  return out;
}

bool TgsParams::all_finite() const {
  for (const auto& r : trainable())
    if (!r.value->all_finite()) return false;
  for (const auto& r : buffers())
    if (!r.value->all_finite()) return false;
  return true;
}

}  // namespace tgs
