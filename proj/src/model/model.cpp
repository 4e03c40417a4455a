#include "tgs/model/model.hpp"

#include <algorithm>
#include <stdexcept>

#include "tgs/error.hpp"
#include "tgs/numeric/losses.hpp"

namespace tgs {

namespace {

Matrix head_forward(const Matrix& h, const Matrix& weight, const Matrix& bias) {
  Matrix out = linear_forward(h, weight);
  add_row_vector(out, bias);
  return out;
}

void check_input_width(const TgsParams& params, Index cols) {
  if (cols != params.shape.input_dim) {
    throw DimensionError("backbone input width " + std::to_string(cols) + " != model input dim " +
                         std::to_string(params.shape.input_dim));
  }
}

std::vector<Index> as_index(std::span<const NodeId> ids) { return {ids.begin(), ids.end()}; }

void softmax_backward_accumulate(const Matrix& probs, const Matrix& upstream, Matrix& out) {
  out += softmax_rows_backward(probs, upstream);
}

}  // namespace

// ---------------------------------------------------------------------------
// Backbone
// ---------------------------------------------------------------------------

Matrix backbone_forward(const TgsParams& params, const SparseRows& x) {
  check_input_width(params, x.cols());
  Matrix h;
  for (Index l = 0; l < params.backbone.size(); ++l) {
    Matrix pre = l == 0 ? sparse_matmul(x, params.backbone[0]) : linear_forward(h, params.backbone[l]);
    h = batchnorm_eval(relu(pre), params.norms[l]);
  }
  require_finite(h, "backbone_forward");
  return h;
}

Matrix backbone_forward(const TgsParams& params, const Matrix& x) {
  check_input_width(params, x.cols());
  return backbone_forward(params, SparseRows::from_dense(x));
}

Matrix backbone_forward_train(TgsParams& params, const SparseRows& x, double dropout, Rng& rng, BackboneCache& cache) {
  check_input_width(params, x.cols());
  cache.input = x;
  cache.layers.assign(params.backbone.size(), LayerCache{});
  Matrix h;
  for (Index l = 0; l < params.backbone.size(); ++l) {
    LayerCache& lc = cache.layers[l];
    if (l == 0) {
      lc.pre_activation = sparse_matmul(x, params.backbone[0]);
    } else {
      lc.input = std::move(h);
      lc.pre_activation = linear_forward(lc.input, params.backbone[l]);
    }
    Matrix normed = batchnorm_forward(relu(lc.pre_activation), params.norms[l], true, &lc.norm);
    auto dropped = dropout_forward(normed, dropout, rng, true);
    lc.dropout_mask = std::move(dropped.mask);
    h = std::move(dropped.output);
  }
  require_finite(h, "backbone_forward_train");
  return h;
}

void backbone_backward(const TgsParams& params, const BackboneCache& cache, const Matrix& grad_embeddings,
                       TgsParams& grads) {
  if (cache.layers.size() != params.backbone.size()) {
    throw NumericError("backbone_backward: no training-mode forward cache");
  }
  Matrix upstream = grad_embeddings;
  for (Index l = params.backbone.size(); l-- > 0;) {
    const LayerCache& lc = cache.layers[l];
    Matrix d_norm = dropout_backward(lc.dropout_mask, upstream);
    BatchNormGrad bn = batchnorm_backward(lc.norm, params.norms[l], d_norm);
    grads.norms[l].scale += bn.scale;
    grads.norms[l].shift += bn.shift;
    Matrix d_pre = relu_backward(lc.pre_activation, bn.input);
    if (l == 0) {
      sparse_matmul_at_b_accumulate(cache.input, d_pre, grads.backbone[0]);
    } else {
      LinearGrad lg = linear_backward(lc.input, params.backbone[l], d_pre, true);
      grads.backbone[l] += lg.weight;
      upstream = std::move(lg.input);
    }
  }
}

// ---------------------------------------------------------------------------
// Mixup
// ---------------------------------------------------------------------------

double mixup_coefficient(const TgsParams& params, std::span<const double> x_i, std::span<const double> x_j) {
  const Index d = params.shape.input_dim;
  const Index f = params.shape.hidden_dim;
  if (x_i.size() != d || x_j.size() != d) throw DimensionError("mixup_coefficient: feature width != input dim");
  double score = 0.0;
  for (Index c = 0; c < f; ++c) {
    double pi = 0.0, pj = 0.0;
    for (Index k = 0; k < d; ++k) {
      pi += x_i[k] * params.mix_proj(k, c);
      pj += x_j[k] * params.mix_proj(k, c);
    }
    score += params.attention(c, 0) * pi + params.attention(f + c, 0) * pj;
  }
  return sigmoid(score);
}

Matrix mixup_head(const TgsParams& params, const Matrix& h_i, const Matrix& h_j, std::span<const double> beta) {
  require_same_shape(h_i, h_j, "mixup_head");
  if (beta.size() != h_i.rows()) throw DimensionError("mixup_head: one beta per row required");
  Matrix mixed(h_i.rows(), h_i.cols());
  for (Index r = 0; r < h_i.rows(); ++r) {
    const auto a = h_i.row(r);
    const auto b = h_j.row(r);
    auto dst = mixed.row(r);
    for (Index c = 0; c < dst.size(); ++c) dst[c] = beta[r] * b[c] + (1.0 - beta[r]) * a[c];
  }
  return head_forward(mixed, params.head_g, params.bias_g);
}

// ---------------------------------------------------------------------------
// Batch forward
// ---------------------------------------------------------------------------

Index ForwardBundle::local(NodeId v) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
  if (it == nodes.end() || *it != v) throw std::out_of_range("node " + std::to_string(v) + " not in forward bundle");
  return static_cast<Index>(it - nodes.begin());
}

ForwardBundle forward_batch(TgsParams& params, const SparseRows& features, const EdgeBatch& batch, ForwardMode mode,
                            const ForwardOptions& opts, Rng& rng, std::span<const NodeId> extra_nodes) {
  ForwardBundle b;
  b.training = mode == ForwardMode::Train;
  b.mixup = opts.mixup;

  b.nodes.reserve(2 * batch.edges.size() + batch.negatives.size() + extra_nodes.size());
  for (const Edge& e : batch.edges) {
    b.nodes.push_back(e.u);
    b.nodes.push_back(e.v);
  }
  for (const NegativeTerm& t : batch.negatives) b.nodes.push_back(t.node);
  b.nodes.insert(b.nodes.end(), extra_nodes.begin(), extra_nodes.end());
  std::sort(b.nodes.begin(), b.nodes.end());
  b.nodes.erase(std::unique(b.nodes.begin(), b.nodes.end()), b.nodes.end());
  if (b.nodes.empty()) throw std::invalid_argument("forward_batch: batch touches no nodes");

  b.inputs = features.gather(as_index(b.nodes));
  b.embeddings = b.training ? backbone_forward_train(params, b.inputs, opts.dropout, rng, b.backbone)
                            : backbone_forward(params, b.inputs);
  b.y = head_forward(b.embeddings, params.head_f, params.bias_f);
  b.z = head_forward(b.embeddings, params.head_g, params.bias_g);
  b.y_prob = softmax_rows(b.y);
  b.z_prob = softmax_rows(b.z);

  const Index pairs = 2 * batch.edges.size();
  if (pairs == 0) return b;
  b.pair_anchor.resize(pairs);
  b.pair_partner.resize(pairs);
  for (Index e = 0; e < batch.edges.size(); ++e) {
    const Index u = b.local(batch.edges[e].u);
    const Index v = b.local(batch.edges[e].v);
    b.pair_anchor[2 * e] = u;
    b.pair_partner[2 * e] = v;
    b.pair_anchor[2 * e + 1] = v;
    b.pair_partner[2 * e + 1] = u;
  }

  const Index f = params.shape.hidden_dim;
  b.beta.assign(pairs, 1.0);
  if (opts.mixup == MixupMode::Learned) {
    b.projected = sparse_matmul(b.inputs, params.mix_proj);
    for (Index p = 0; p < pairs; ++p) {
      const auto pa = b.projected.row(b.pair_anchor[p]);
      const auto pb = b.projected.row(b.pair_partner[p]);
      double score = 0.0;
      for (Index c = 0; c < f; ++c) score += params.attention(c, 0) * pa[c] + params.attention(f + c, 0) * pb[c];
      b.beta[p] = sigmoid(score);
    }
  }
  b.mixed = Matrix(pairs, f);
  for (Index p = 0; p < pairs; ++p) {
    const auto ha = b.embeddings.row(b.pair_anchor[p]);
    const auto hb = b.embeddings.row(b.pair_partner[p]);
    auto dst = b.mixed.row(p);
    const double beta = b.beta[p];
    for (Index c = 0; c < f; ++c) dst[c] = beta * hb[c] + (1.0 - beta) * ha[c];
  }
  b.z_mix = head_forward(b.mixed, params.head_g, params.bias_g);
  require_finite(b.z_mix, "forward_batch mixup head");
  return b;
}

HeadGradients HeadGradients::zeros_for(const ForwardBundle& bundle) {
  return {Matrix(bundle.y.rows(), bundle.y.cols()), Matrix(bundle.z.rows(), bundle.z.cols()),
          Matrix(bundle.z_mix.rows(), bundle.z_mix.cols())};
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

double feature_loss_batch(const ForwardBundle& bundle, const EdgeBatch& batch, const FeatureLossOptions& opts,
                          HeadGradients* grads, double scale) {
  const Index pairs = bundle.pair_anchor.size();
  if (batch.positive_weights.size() != pairs) throw DimensionError("feature_loss_batch: positive weight count");
  const Index c = bundle.y.cols();
  double loss = 0.0;

  Matrix d_yprob, d_zprob;
  if (grads != nullptr) {
    d_yprob = Matrix(bundle.y.rows(), c);
    d_zprob = Matrix(bundle.z.rows(), c);
  }

  // positives: ‖y_a − z'_p‖² on raw outputs (or on softmaxed outputs when normalized)
  Matrix zmix_prob;
  Matrix d_zmix_prob;
  if (opts.normalize_positive_term) {
    zmix_prob = softmax_rows(bundle.z_mix);
    if (grads != nullptr) d_zmix_prob = Matrix(pairs, c);
  }
  for (Index p = 0; p < pairs; ++p) {
    const Index a = bundle.pair_anchor[p];
    const double w = batch.positive_weights[p];
    const auto lhs = opts.normalize_positive_term ? bundle.y_prob.row(a) : bundle.y.row(a);
    const auto rhs = opts.normalize_positive_term ? zmix_prob.row(p) : bundle.z_mix.row(p);
    double sq = 0.0;
    for (Index k = 0; k < c; ++k) sq += (lhs[k] - rhs[k]) * (lhs[k] - rhs[k]);
    loss += w * sq;
    if (grads == nullptr) continue;
    auto gl = opts.normalize_positive_term ? d_yprob.row(a) : grads->y.row(a);
    auto gr = opts.normalize_positive_term ? d_zmix_prob.row(p) : grads->z_mix.row(p);
    for (Index k = 0; k < c; ++k) {
      const double g = scale * 2.0 * w * (lhs[k] - rhs[k]);
      gl[k] += g;
      gr[k] -= g;
    }
  }

  // negatives: −‖ŷ_a − ẑ_k‖² on softmaxed outputs
  if (opts.use_negatives) {
    for (const NegativeTerm& t : batch.negatives) {
      const Edge& e = batch.edges[t.edge];
      const Index a = bundle.local(t.side == Side::First ? e.u : e.v);
      const Index k = bundle.local(t.node);
      const auto ya = bundle.y_prob.row(a);
      const auto zk = bundle.z_prob.row(k);
      double sq = 0.0;
      for (Index j = 0; j < c; ++j) sq += (ya[j] - zk[j]) * (ya[j] - zk[j]);
      loss -= t.weight * sq;
      if (grads == nullptr) continue;
      auto gy = d_yprob.row(a);
      auto gz = d_zprob.row(k);
      for (Index j = 0; j < c; ++j) {
        const double g = scale * 2.0 * t.weight * (ya[j] - zk[j]);
        gy[j] -= g;
        gz[j] += g;
      }
    }
  }

  if (grads != nullptr) {
    softmax_backward_accumulate(bundle.y_prob, d_yprob, grads->y);
    softmax_backward_accumulate(bundle.z_prob, d_zprob, grads->z);
    if (opts.normalize_positive_term) softmax_backward_accumulate(zmix_prob, d_zmix_prob, grads->z_mix);
  }
  return loss;
}

double label_loss_batch(const ForwardBundle& bundle, const EdgeBatch& batch, std::span<const Label> labels,
                        const Mask& train_mask, bool neighbor_terms, HeadGradients* grads, double scale) {
  std::vector<std::uint8_t> in_vb(bundle.nodes.size(), 0);
  Index vb = 0;
  for (const Edge& e : batch.edges) {
    for (NodeId v : {e.u, e.v}) {
      if (train_mask[v] == 0 || labels[v] < 0) continue;
      const Index i = bundle.local(v);
      if (in_vb[i] == 0) {
        in_vb[i] = 1;
        ++vb;
      }
    }
  }
  if (vb == 0) return 0.0;
  const double inv = 1.0 / static_cast<double>(vb);

  auto add_ce = [&](const Matrix& logits, const Matrix& probs, Matrix* grad, Index row, Label y) {
    const double l = cross_entropy_row(logits.row(row), y);
    if (grad != nullptr) {
      auto g = grad->row(row);
      const auto p = probs.row(row);
      for (Index k = 0; k < g.size(); ++k) g[k] += scale * inv * (p[k] - (static_cast<Label>(k) == y ? 1.0 : 0.0));
    }
    return l;
  };

  double loss = 0.0;
  for (Index i = 0; i < bundle.nodes.size(); ++i) {
    if (in_vb[i] == 0) continue;
    loss += add_ce(bundle.y, bundle.y_prob, grads ? &grads->y : nullptr, i, labels[bundle.nodes[i]]);
  }
  if (neighbor_terms) {
    for (Index p = 0; p < bundle.pair_anchor.size(); ++p) {
      const Index i = bundle.pair_anchor[p];
      if (in_vb[i] == 0) continue;
      loss += add_ce(bundle.z, bundle.z_prob, grads ? &grads->z : nullptr, bundle.pair_partner[p],
                     labels[bundle.nodes[i]]);
    }
  }
  return loss * inv;
}

double supervised_loss(const ForwardBundle& bundle, std::span<const Label> labels, const Mask& train_mask,
                       HeadGradients* grads, double scale) {
  std::vector<Index> rows;
  std::vector<Label> ys;
  for (Index i = 0; i < bundle.nodes.size(); ++i) {
    const NodeId v = bundle.nodes[i];
    if (train_mask[v] != 0 && labels[v] >= 0) {
      rows.push_back(i);
      ys.push_back(labels[v]);
    }
  }
  if (rows.empty()) return 0.0;
  const CrossEntropyResult ce = cross_entropy(bundle.y.gather_rows(rows), ys);
  if (grads != nullptr) {
    for (Index r = 0; r < rows.size(); ++r) {
      auto dst = grads->y.row(rows[r]);
      const auto src = ce.grad.row(r);
      for (Index k = 0; k < dst.size(); ++k) dst[k] += scale * src[k];
    }
  }
  return ce.loss;
}

double total_loss(double feature_loss, double label_loss, double alpha) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  return label_loss + alpha * feature_loss;
}

// ---------------------------------------------------------------------------
// Backward
// ---------------------------------------------------------------------------

void backward_batch(const TgsParams& params, const ForwardBundle& bundle, const HeadGradients& head_grads,
                    TgsParams& grads) {
  if (!bundle.training) throw NumericError("backward_batch: bundle was forwarded in eval mode");
  require_same_shape(head_grads.y, bundle.y, "backward_batch dy");
  require_same_shape(head_grads.z, bundle.z, "backward_batch dz");
  require_same_shape(head_grads.z_mix, bundle.z_mix, "backward_batch dz'");

  const Matrix& h = bundle.embeddings;
  grads.head_f += matmul_at_b(h, head_grads.y);
  grads.bias_f += column_sums(head_grads.y);
  Matrix d_h = matmul_a_bt(head_grads.y, params.head_f);

  grads.head_g += matmul_at_b(h, head_grads.z);
  grads.bias_g += column_sums(head_grads.z);
  d_h += matmul_a_bt(head_grads.z, params.head_g);

  const Index pairs = bundle.pair_anchor.size();
  if (pairs > 0) {
    grads.head_g += matmul_at_b(bundle.mixed, head_grads.z_mix);
    grads.bias_g += column_sums(head_grads.z_mix);
    const Matrix d_mixed = matmul_a_bt(head_grads.z_mix, params.head_g);
    const Index f = params.shape.hidden_dim;
    const bool learned = bundle.mixup == MixupMode::Learned;
    Matrix d_proj = learned ? Matrix(bundle.projected.rows(), f) : Matrix();
    for (Index p = 0; p < pairs; ++p) {
      const Index a = bundle.pair_anchor[p];
      const Index b = bundle.pair_partner[p];
      const double beta = bundle.beta[p];
      const auto dm = d_mixed.row(p);
      auto dha = d_h.row(a);
      for (Index c = 0; c < f; ++c) dha[c] += (1.0 - beta) * dm[c];
      auto dhb = d_h.row(b);
      for (Index c = 0; c < f; ++c) dhb[c] += beta * dm[c];
      if (!learned) continue;
      const auto ha = h.row(a);
      const auto hb = h.row(b);
      double d_beta = 0.0;
      for (Index c = 0; c < f; ++c) d_beta += dm[c] * (hb[c] - ha[c]);
      const double d_score = d_beta * beta * (1.0 - beta);
      const auto pa = bundle.projected.row(a);
      const auto pb = bundle.projected.row(b);
      auto dpa = d_proj.row(a);
      for (Index c = 0; c < f; ++c) {
        grads.attention(c, 0) += d_score * pa[c];
        grads.attention(f + c, 0) += d_score * pb[c];
        dpa[c] += d_score * params.attention(c, 0);
      }
      auto dpb = d_proj.row(b);
      for (Index c = 0; c < f; ++c) dpb[c] += d_score * params.attention(f + c, 0);
    }
    if (learned) sparse_matmul_at_b_accumulate(bundle.inputs, d_proj, grads.mix_proj);
  }

  backbone_backward(params, bundle.backbone, d_h, grads);
}

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

std::vector<Label> argmax_rows(const Matrix& m) {
  std::vector<Label> out(m.rows(), 0);
  for (Index i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    Index best = 0;
    for (Index k = 1; k < r.size(); ++k)
      if (r[k] > r[best]) best = k;
    out[i] = static_cast<Label>(best);
  }
  return out;
}

Matrix infer_logits(const TgsParams& params, const SparseRows& rows) {
  return head_forward(backbone_forward(params, rows), params.head_f, params.bias_f);
}

Prediction infer(const TgsParams& params, const SparseRows& rows) {
  Prediction p;
  p.probabilities = softmax_rows(infer_logits(params, rows));
  p.labels = argmax_rows(p.probabilities);
  return p;
}

Prediction infer(const TgsParams& params, const Matrix& rows) {
  check_input_width(params, rows.cols());
  return infer(params, SparseRows::from_dense(rows));
}

}  // namespace tgs
