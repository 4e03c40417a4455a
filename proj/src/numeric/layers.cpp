#include "tgs/numeric/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "tgs/error.hpp"

namespace tgs {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMajor>;
using Map = Eigen::Map<RowMajor>;

MapC view(const Matrix& m) {
  return MapC(m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
}
Map view(Matrix& m) {
  return Map(m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
}

std::string dims(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: " + dims(a) + " by " + dims(b));
  Matrix out(a.rows(), b.cols());
  if (out.empty() || a.cols() == 0) return out;
  view(out).noalias() = view(a) * view(b);
  return out;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("matmul_at_b: " + dims(a) + " by " + dims(b));
  Matrix out(a.cols(), b.cols());
  if (out.empty() || a.rows() == 0) return out;
  view(out).noalias() = view(a).transpose() * view(b);
  return out;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("matmul_a_bt: " + dims(a) + " by " + dims(b));
  Matrix out(a.rows(), b.rows());
  if (out.empty() || a.cols() == 0) return out;
  view(out).noalias() = view(a) * view(b).transpose();
  return out;
}

void add_row_vector(Matrix& m, const Matrix& bias) {
  if (bias.rows() != 1 || bias.cols() != m.cols()) throw DimensionError("add_row_vector: bias " + dims(bias));
  for (Index i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (Index j = 0; j < r.size(); ++j) r[j] += bias(0, j);
  }
}

Matrix column_sums(const Matrix& m) {
  Matrix out(1, m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (Index j = 0; j < r.size(); ++j) out(0, j) += r[j];
  }
  return out;
}

Matrix linear_forward(const Matrix& input, const Matrix& weight) {
  if (input.cols() != weight.rows()) throw DimensionError("linear_forward: " + dims(input) + " by " + dims(weight));
  return matmul(input, weight);
}

LinearGrad linear_backward(const Matrix& input, const Matrix& weight, const Matrix& upstream, bool need_input_grad) {
  if (upstream.rows() != input.rows() || upstream.cols() != weight.cols() || input.cols() != weight.rows()) {
    throw DimensionError("linear_backward: input " + dims(input) + ", weight " + dims(weight) + ", upstream " +
                         dims(upstream));
  }
  LinearGrad g;
  g.weight = matmul_at_b(input, upstream);
  if (need_input_grad) g.input = matmul_a_bt(upstream, weight);
  return g;
}

Matrix relu(const Matrix& x) {
  Matrix out = x;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

Matrix relu_backward(const Matrix& pre_activation, const Matrix& upstream) {
  require_same_shape(pre_activation, upstream, "relu_backward");
  Matrix out = upstream;
  const auto pre = pre_activation.values();
  auto g = out.values();
  for (Index k = 0; k < g.size(); ++k)
    if (pre[k] <= 0.0) g[k] = 0.0;
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix sigmoid(const Matrix& x) {
  Matrix out = x;
  for (double& v : out.values()) v = sigmoid(v);
  return out;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const auto in = logits.row(i);
    auto dst = out.row(i);
    if (in.empty()) continue;
    const double mx = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (Index j = 0; j < in.size(); ++j) {
      dst[j] = std::exp(in[j] - mx);
      total += dst[j];
    }
    for (double& v : dst) v /= total;
  }
  return out;
}

Matrix softmax_rows_backward(const Matrix& probs, const Matrix& upstream) {
  require_same_shape(probs, upstream, "softmax_rows_backward");
  Matrix out(probs.rows(), probs.cols());
  for (Index i = 0; i < probs.rows(); ++i) {
    const auto p = probs.row(i);
    const auto u = upstream.row(i);
    double dot = 0.0;
    for (Index j = 0; j < p.size(); ++j) dot += p[j] * u[j];
    auto dst = out.row(i);
    for (Index j = 0; j < p.size(); ++j) dst[j] = p[j] * (u[j] - dot);
  }
  return out;
}

BatchNormState BatchNormState::fresh(Index features, double momentum, double epsilon) {
  if (!(momentum > 0.0 && momentum < 1.0)) throw NumericError("batch norm momentum must lie in (0,1)");
  if (!(epsilon > 0.0)) throw NumericError("batch norm epsilon must be > 0");
  BatchNormState s;
  s.running_mean = Matrix(1, features, 0.0);
  s.running_var = Matrix(1, features, 1.0);
  s.scale = Matrix(1, features, 1.0);
  s.shift = Matrix(1, features, 0.0);
  s.momentum = momentum;
  s.epsilon = epsilon;
  return s;
}

Matrix batchnorm_eval(const Matrix& input, const BatchNormState& state) {
  if (input.cols() != state.scale.cols()) throw DimensionError("batchnorm: input " + dims(input));
  Matrix out(input.rows(), input.cols());
  const Index f = input.cols();
  std::vector<double> mul(f), add(f);
  for (Index j = 0; j < f; ++j) {
    const double inv = 1.0 / std::sqrt(state.running_var(0, j) + state.epsilon);
    mul[j] = state.scale(0, j) * inv;
    add[j] = state.shift(0, j) - state.running_mean(0, j) * mul[j];
  }
  for (Index i = 0; i < input.rows(); ++i) {
    const auto in = input.row(i);
    auto dst = out.row(i);
    for (Index j = 0; j < f; ++j) dst[j] = in[j] * mul[j] + add[j];
  }
  return out;
}

Matrix batchnorm_forward(const Matrix& input, BatchNormState& state, bool training, BatchNormCache* cache) {
  if (!training) return batchnorm_eval(input, state);
  if (input.rows() == 0) throw DimensionError("batchnorm_forward: empty batch");
  if (input.cols() != state.scale.cols()) throw DimensionError("batchnorm: input " + dims(input));
  const Index n = input.rows();
  const Index f = input.cols();
  std::vector<double> mean(f, 0.0), var(f, 0.0), inv_std(f);
  for (Index i = 0; i < n; ++i) {
    const auto r = input.row(i);
    for (Index j = 0; j < f; ++j) mean[j] += r[j];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (Index i = 0; i < n; ++i) {
    const auto r = input.row(i);
    for (Index j = 0; j < f; ++j) {
      const double d = r[j] - mean[j];
      var[j] += d * d;
    }
  }
  for (double& v : var) v /= static_cast<double>(n);
  for (Index j = 0; j < f; ++j) inv_std[j] = 1.0 / std::sqrt(var[j] + state.epsilon);

  Matrix normalized(n, f);
  Matrix out(n, f);
  for (Index i = 0; i < n; ++i) {
    const auto r = input.row(i);
    auto xh = normalized.row(i);
    auto dst = out.row(i);
    for (Index j = 0; j < f; ++j) {
      xh[j] = (r[j] - mean[j]) * inv_std[j];
      dst[j] = state.scale(0, j) * xh[j] + state.shift(0, j);
    }
  }

  // running variance tracks the unbiased estimate when it exists
  const double unbias = n > 1 ? static_cast<double>(n) / static_cast<double>(n - 1) : 1.0;
  for (Index j = 0; j < f; ++j) {
    state.running_mean(0, j) = (1.0 - state.momentum) * state.running_mean(0, j) + state.momentum * mean[j];
    state.running_var(0, j) = (1.0 - state.momentum) * state.running_var(0, j) + state.momentum * var[j] * unbias;
  }

  if (cache != nullptr) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
    cache->batch_mean = std::move(mean);
    cache->batch_var = std::move(var);
  }
  return out;
}

BatchNormGrad batchnorm_backward(const BatchNormCache& cache, const BatchNormState& state, const Matrix& upstream) {
  if (cache.inv_std.empty()) throw NumericError("batchnorm_backward: no training-mode forward cache");
  require_same_shape(cache.normalized, upstream, "batchnorm_backward");
  const Index n = upstream.rows();
  const Index f = upstream.cols();
  BatchNormGrad g{Matrix(n, f), Matrix(1, f), Matrix(1, f)};
  std::vector<double> sum_dxh(f, 0.0), sum_dxh_xh(f, 0.0);
  for (Index i = 0; i < n; ++i) {
    const auto u = upstream.row(i);
    const auto xh = cache.normalized.row(i);
    for (Index j = 0; j < f; ++j) {
      g.shift(0, j) += u[j];
      g.scale(0, j) += u[j] * xh[j];
      const double dxh = u[j] * state.scale(0, j);
      sum_dxh[j] += dxh;
      sum_dxh_xh[j] += dxh * xh[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Index i = 0; i < n; ++i) {
    const auto u = upstream.row(i);
    const auto xh = cache.normalized.row(i);
    auto dst = g.input.row(i);
    for (Index j = 0; j < f; ++j) {
      const double dxh = u[j] * state.scale(0, j);
      dst[j] = cache.inv_std[j] * (dxh - inv_n * sum_dxh[j] - xh[j] * inv_n * sum_dxh_xh[j]);
    }
  }
  return g;
}

DropoutResult dropout_forward(const Matrix& input, double p, Rng& rng, bool training) {
  if (!(p >= 0.0 && p < 1.0)) throw NumericError("dropout probability must lie in [0,1), got " + std::to_string(p));
  if (!training || p == 0.0) return {input, Matrix(input.rows(), input.cols(), 1.0)};
  DropoutResult r{Matrix(input.rows(), input.cols()), Matrix(input.rows(), input.cols())};
  const double keep_scale = 1.0 / (1.0 - p);
  // each 64-bit draw decides two units; a unit is dropped when its 32-bit half < p·2^32
  const auto threshold = static_cast<std::uint64_t>(std::ldexp(p, 32));
  const double* in = input.data();
  double* out = r.output.data();
  double* mask = r.mask.data();
  const Index n = input.size();
  for (Index k = 0; k < n; k += 2) {
    const std::uint64_t bits = rng.next();
    const double m0 = (bits & 0xffffffffu) < threshold ? 0.0 : keep_scale;
    mask[k] = m0;
    out[k] = in[k] * m0;
    if (k + 1 < n) {
      const double m1 = (bits >> 32) < threshold ? 0.0 : keep_scale;
      mask[k + 1] = m1;
      out[k + 1] = in[k + 1] * m1;
    }
  }
  return r;
}

Matrix dropout_backward(const Matrix& mask, const Matrix& upstream) {
  require_same_shape(mask, upstream, "dropout_backward");
  Matrix out = upstream;
  auto g = out.values();
  const auto m = mask.values();
  for (Index k = 0; k < g.size(); ++k) g[k] *= m[k];
  return out;
}

}  // namespace tgs
