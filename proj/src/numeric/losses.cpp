#include "tgs/numeric/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tgs/error.hpp"
#include "tgs/numeric/layers.hpp"

namespace tgs {

std::vector<double> mse_rowpair(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "mse_rowpair");
  std::vector<double> out(a.rows(), 0.0);
  for (Index i = 0; i < a.rows(); ++i) {
    const auto ra = a.row(i);
    const auto rb = b.row(i);
    double s = 0.0;
    for (Index c = 0; c < ra.size(); ++c) {
      const double d = ra[c] - rb[c];
      s += d * d;
    }
    out[i] = s;
  }
  return out;
}

Matrix mse_rowpair_backward(const Matrix& a, const Matrix& b, std::span<const double> row_weights) {
  require_same_shape(a, b, "mse_rowpair_backward");
  if (row_weights.size() != a.rows()) throw DimensionError("mse_rowpair_backward: weight count");
  Matrix g(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    const auto ra = a.row(i);
    const auto rb = b.row(i);
    auto dst = g.row(i);
    for (Index c = 0; c < ra.size(); ++c) dst[c] = 2.0 * row_weights[i] * (ra[c] - rb[c]);
  }
  return g;
}

double cross_entropy_row(std::span<const double> logits, Label label) {
  if (label < 0 || static_cast<Index>(label) >= logits.size()) {
    throw DimensionError("cross_entropy: label " + std::to_string(label) + " outside [0," +
                         std::to_string(logits.size()) + ")");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double v : logits) total += std::exp(v - mx);
  return mx + std::log(total) - logits[static_cast<Index>(label)];
}

CrossEntropyResult cross_entropy(const Matrix& logits, std::span<const Label> labels) {
  if (labels.size() != logits.rows()) throw DimensionError("cross_entropy: label count != rows");
  CrossEntropyResult r;
  r.grad = softmax_rows(logits);
  const Index n = logits.rows();
  if (n == 0) return r;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Index i = 0; i < n; ++i) {
    r.loss += cross_entropy_row(logits.row(i), labels[i]);
    auto g = r.grad.row(i);
    g[static_cast<Index>(labels[i])] -= 1.0;
    for (double& v : g) v *= inv_n;
  }
  r.loss *= inv_n;
  return r;
}

}  // namespace tgs
