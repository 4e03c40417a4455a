#include "tgs/gcn/gcn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "tgs/error.hpp"
#include "tgs/eval/metrics.hpp"
#include "tgs/model/model.hpp"
#include "tgs/numeric/layers.hpp"
#include "tgs/numeric/losses.hpp"
#include "tgs/train/adam.hpp"
#include "tgs/train/trainer.hpp"

namespace tgs {

NormalizedAdjacency NormalizedAdjacency::from(const GraphStore& g) {
  const Index n = g.num_nodes();
  NormalizedAdjacency a;
  a.offsets.reserve(n + 1);
  a.offsets.push_back(0);
  for (NodeId i = 0; i < n; ++i) {
    const double di = static_cast<double>(g.degree(i) + 1);
    const auto nbrs = g.neighbors(i);
    bool self_done = false;
    for (NodeId j : nbrs) {
      if (!self_done && i < j) {
        a.columns.push_back(i);
        a.coefficients.push_back(1.0 / di);
        self_done = true;
      }
      a.columns.push_back(j);
      a.coefficients.push_back(1.0 / std::sqrt(di * static_cast<double>(g.degree(j) + 1)));
    }
    if (!self_done) {
      a.columns.push_back(i);
      a.coefficients.push_back(1.0 / di);
    }
    a.offsets.push_back(a.columns.size());
  }
  return a;
}

Matrix NormalizedAdjacency::propagate(const Matrix& m) const {
  if (m.rows() != num_nodes()) throw DimensionError("propagate: row count != node count");
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < num_nodes(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      const double c = coefficients[k];
      const auto src = m.row(columns[k]);
      for (Index f = 0; f < dst.size(); ++f) dst[f] += c * src[f];
    }
  }
  return out;
}

GcnParams GcnParams::init(Index input_dim, Index hidden, Index classes, Index layers, Rng& rng) {
  if (input_dim == 0 || hidden == 0 || classes == 0 || layers == 0) {
    throw ConfigError("GCN shape must have positive input, hidden, class and layer counts");
  }
  GcnParams p;
  for (Index l = 0; l < layers; ++l) {
    const Index in = l == 0 ? input_dim : hidden;
    const Index out = l + 1 == layers ? classes : hidden;
    p.weights.push_back(glorot_uniform(in, out, rng));
    p.biases.emplace_back(1, out);
  }
  return p;
}

void GcnConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (hidden < 1) throw ConfigError("hidden must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
}

bool GcnConfig::set(const std::string& key, const std::string& value) {
  if (key == "lr") lr = parse_double(key, value);
  else if (key == "weight_decay") weight_decay = parse_double(key, value);
  else if (key == "epochs") epochs = parse_index(key, value);
  else if (key == "hidden") hidden = parse_index(key, value);
  else if (key == "layers") layers = parse_index(key, value);
  else if (key == "dropout") dropout = parse_double(key, value);
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "normalize_features") normalize_features = parse_bool(key, value);
  else return false;
  return true;
}

ConfigEntries GcnConfig::entries() const {
  return {{"lr", format_double(lr)},
          {"weight_decay", format_double(weight_decay)},
          {"epochs", std::to_string(epochs)},
          {"hidden", std::to_string(hidden)},
          {"layers", std::to_string(layers)},
          {"dropout", format_double(dropout)},
          {"seed", std::to_string(seed)},
          {"normalize_features", normalize_features ? "true" : "false"}};
}

namespace {

struct GcnCache {
  SparseRows input;            // possibly dropped-out features
  std::vector<Matrix> inputs;  // dense layer inputs for l ≥ 1
  std::vector<Matrix> pre;     // Â H W + b per layer
  std::vector<Matrix> masks;   // dropout masks for l ≥ 1
};

Matrix layer_forward(const GcnParams& p, Index l, const Matrix* dense, const SparseRows* sparse,
                     const NormalizedAdjacency& adj) {
  Matrix hw = l == 0 ? sparse_matmul(*sparse, p.weights[0]) : linear_forward(*dense, p.weights[l]);
  Matrix out = adj.propagate(hw);
  add_row_vector(out, p.biases[l]);
  return out;
}

Matrix forward_train(const GcnParams& p, const NormalizedAdjacency& adj, const SparseRows& x, double dropout,
                     Rng& rng, GcnCache& cache) {
  cache.input = x;
  const double keep = 1.0 / (1.0 - dropout);
  for (Index r = 0; r < cache.input.rows(); ++r)
    for (double& v : cache.input.mutable_row_values(r)) v = rng.bernoulli(dropout) ? 0.0 : v * keep;
  cache.inputs.assign(p.num_layers(), Matrix());
  cache.masks.assign(p.num_layers(), Matrix());
  cache.pre.clear();
  Matrix h;
  for (Index l = 0; l < p.num_layers(); ++l) {
    if (l > 0) {
      auto dropped = dropout_forward(relu(cache.pre.back()), dropout, rng, true);
      cache.masks[l] = std::move(dropped.mask);
      cache.inputs[l] = std::move(dropped.output);
    }
    cache.pre.push_back(layer_forward(p, l, &cache.inputs[l], &cache.input, adj));
  }
  return cache.pre.back();
}

void backward(const GcnParams& p, const NormalizedAdjacency& adj, const GcnCache& cache, Matrix upstream,
              GcnParams& grads) {
  for (Index l = p.num_layers(); l-- > 0;) {
    grads.biases[l] += column_sums(upstream);
    const Matrix d_hw = adj.propagate(upstream);  // Â is symmetric
    if (l == 0) {
      sparse_matmul_at_b_accumulate(cache.input, d_hw, grads.weights[0]);
      break;
    }
    grads.weights[l] += matmul_at_b(cache.inputs[l], d_hw);
    const Matrix d_in = matmul_a_bt(d_hw, p.weights[l]);
    upstream = relu_backward(cache.pre[l - 1], dropout_backward(cache.masks[l], d_in));
  }
}

std::vector<ParamRef> refs(GcnParams& p) {
  std::vector<ParamRef> out;
  for (Index l = 0; l < p.num_layers(); ++l) {
    out.push_back({"gcn." + std::to_string(l) + ".weight", &p.weights[l]});
    out.push_back({"gcn." + std::to_string(l) + ".bias", &p.biases[l]});
  }
  return out;
}

std::vector<ConstParamRef> const_refs(const GcnParams& p) {
  std::vector<ConstParamRef> out;
  for (auto& r : refs(const_cast<GcnParams&>(p))) out.push_back({r.name, r.value});
  return out;
}

Index count(const Mask& m) {
  Index n = 0;
  for (auto v : m) n += v != 0;
  return n;
}

}  // namespace

Matrix gcn_full_forward(const GcnParams& params, const NormalizedAdjacency& adj, const SparseRows& x) {
  if (x.cols() != params.input_dim()) throw DimensionError("gcn_full_forward: feature width != input dim");
  Matrix h;
  for (Index l = 0; l < params.num_layers(); ++l) {
    Matrix out = layer_forward(params, l, &h, &x, adj);
    h = l + 1 == params.num_layers() ? std::move(out) : relu(out);
  }
  return h;
}

GcnTrainResult gcn_train(const GraphStore& g, const GcnConfig& cfg) {
  cfg.validate();
  if (!g.has_split()) throw std::invalid_argument("gcn_train: dataset has no split");
  const SplitMasks& split = g.split();
  const std::vector<NodeId> train_nodes = mask_nodes(split.train);
  if (train_nodes.empty()) throw std::invalid_argument("gcn_train: empty train mask");

  const auto start = std::chrono::steady_clock::now();
  Rng root(cfg.seed);
  Rng init_rng = root.fork(1);
  Rng dropout_rng = root.fork(3);
  const SparseRows x = model_inputs(g, cfg.normalize_features);
  const NormalizedAdjacency adj = NormalizedAdjacency::from(g);
  GcnParams params = GcnParams::init(g.feature_dim(), cfg.hidden, g.num_classes(), cfg.layers, init_rng);
  GcnParams grads = params;
  AdamState adam = AdamState::for_params(refs(params));

  std::vector<Index> train_rows(train_nodes.begin(), train_nodes.end());
  std::vector<Label> train_labels;
  for (NodeId v : train_nodes) train_labels.push_back(g.labels()[v]);

  RunReport report;
  report.method = "gcn";
  report.config = cfg.entries();
  report.seed = cfg.seed;
  report.num_nodes = g.num_nodes();
  report.num_edges = g.num_edges();
  report.num_classes = g.num_classes();
  report.feature_dim = g.feature_dim();
  report.train_nodes = train_nodes.size();
  report.val_nodes = count(split.val);
  report.test_nodes = count(split.test);

  GcnParams best = params;
  double best_val = -1.0;
  for (Index epoch = 1; epoch <= cfg.epochs; ++epoch) {
    GcnCache cache;
    const Matrix logits = forward_train(params, adj, x, cfg.dropout, dropout_rng, cache);
    const CrossEntropyResult ce = cross_entropy(logits.gather_rows(train_rows), train_labels);
    if (!std::isfinite(ce.loss)) throw NumericError("GCN loss became non-finite in epoch " + std::to_string(epoch));
    Matrix upstream(logits.rows(), logits.cols());
    for (Index r = 0; r < train_rows.size(); ++r) {
      auto dst = upstream.row(train_rows[r]);
      const auto src = ce.grad.row(r);
      std::copy(src.begin(), src.end(), dst.begin());
    }
    for (auto& r : refs(grads)) r.value->fill(0.0);
    backward(params, adj, cache, std::move(upstream), grads);
    // L2 on the first layer only, added to the gradient
    {
      auto gw = grads.weights[0].values();
      const auto w = params.weights[0].values();
      for (Index i = 0; i < gw.size(); ++i) gw[i] += cfg.weight_decay * w[i];
    }
    adam_step(refs(params), const_refs(grads), adam, cfg.lr, 0.0);

    const Matrix eval_logits = gcn_full_forward(params, adj, x);
    const auto preds = argmax_rows(eval_logits);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss_total = rec.loss_label = ce.loss;
    double train_ce = 0.0, val_ce = 0.0;
    Index nv = 0;
    for (NodeId v : train_nodes) train_ce += cross_entropy_row(eval_logits.row(v), g.labels()[v]);
    for (Index v = 0; v < split.val.size(); ++v)
      if (split.val[v] != 0 && g.labels()[v] >= 0) {
        val_ce += cross_entropy_row(eval_logits.row(v), g.labels()[v]);
        ++nv;
      }
    rec.train_ce = train_ce / static_cast<double>(train_nodes.size());
    rec.val_ce = nv == 0 ? 0.0 : val_ce / static_cast<double>(nv);
    rec.train_acc = accuracy(preds, g.labels(), split.train);
    rec.val_acc = accuracy(preds, g.labels(), split.val);
    const double test_acc = accuracy(preds, g.labels(), split.test);
    report.epochs.push_back(rec);
    if (rec.val_acc > best_val) {
      best_val = rec.val_acc;
      best = params;
      report.best_epoch = epoch;
      report.best_val_acc = rec.val_acc;
      report.test_acc = test_acc;
    }
    if (epoch == cfg.epochs) {
      report.final_val_acc = rec.val_acc;
      report.final_test_acc = test_acc;
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.train_seconds = seconds;
  report.mean_epoch_ms = 1000.0 * seconds / static_cast<double>(cfg.epochs);
  return {std::move(best), std::move(report)};
}

SingleNodeResult gcn_infer_single_node(const GcnParams& params, const GraphStore& g, const NormalizedAdjacency& adj,
                                       const SparseRows& x, NodeId v, GcnReuseCache* reuse) {
  if (v >= g.num_nodes()) throw std::out_of_range("gcn_infer_single_node: node " + std::to_string(v) + " out of range");
  const Index layers = params.num_layers();
  SingleNodeResult res;

  // frontiers[l] = nodes whose layer-l output is needed (frontiers[L] = {v})
  std::vector<std::vector<NodeId>> frontiers(layers + 1);
  frontiers[layers] = {v};
  std::vector<Index> mark(g.num_nodes(), 0);
  Index stamp = 0;
  for (Index l = layers; l-- > 0;) {
    ++stamp;
    auto& next = frontiers[l];
    for (NodeId u : frontiers[l + 1]) {
      if (reuse != nullptr && reuse->layers.size() > l + 1 && reuse->layers[l + 1].count(u) != 0) continue;
      ++res.adjacency_reads;
      for (std::size_t k = adj.offsets[u]; k < adj.offsets[u + 1]; ++k) {
        const NodeId w = adj.columns[k];
        if (mark[w] != stamp) {
          mark[w] = stamp;
          next.push_back(w);
        }
      }
    }
  }

  if (reuse != nullptr && reuse->layers.size() < layers + 1) reuse->layers.resize(layers + 1);
  std::unordered_map<NodeId, std::vector<double>> prev;  // layer-l rows of frontiers[l]
  for (NodeId u : frontiers[0]) {
    if (reuse != nullptr) {
      if (auto it = reuse->layers[0].find(u); it != reuse->layers[0].end()) {
        prev.emplace(u, it->second);
        continue;
      }
    }
    std::vector<double> row(x.cols(), 0.0);
    const auto idx = x.row_indices(u);
    const auto val = x.row_values(u);
    for (Index k = 0; k < idx.size(); ++k) row[idx[k]] = val[k];
    ++res.fetches;
    if (reuse != nullptr) reuse->layers[0].emplace(u, row);
    prev.emplace(u, std::move(row));
  }

  for (Index l = 0; l < layers; ++l) {
    const Matrix& w = params.weights[l];
    // projected rows (h W) for every node of frontier l
    std::unordered_map<NodeId, std::vector<double>> projected;
    for (const auto& [u, row] : prev) {
      std::vector<double> hw(w.cols(), 0.0);
      for (Index k = 0; k < row.size(); ++k) {
        if (row[k] == 0.0) continue;
        const auto wr = w.row(k);
        for (Index c = 0; c < hw.size(); ++c) hw[c] += row[k] * wr[c];
      }
      projected.emplace(u, std::move(hw));
    }
    std::unordered_map<NodeId, std::vector<double>> next;
    for (NodeId u : frontiers[l + 1]) {
      if (reuse != nullptr) {
        if (auto it = reuse->layers[l + 1].find(u); it != reuse->layers[l + 1].end()) {
          next.emplace(u, it->second);
          continue;
        }
      }
      std::vector<double> out(params.biases[l].row(0).begin(), params.biases[l].row(0).end());
      for (std::size_t k = adj.offsets[u]; k < adj.offsets[u + 1]; ++k) {
        const auto& src = projected.at(adj.columns[k]);
        for (Index c = 0; c < out.size(); ++c) out[c] += adj.coefficients[k] * src[c];
      }
      if (l + 1 < layers)
        for (double& o : out) o = std::max(o, 0.0);
      if (reuse != nullptr) reuse->layers[l + 1].emplace(u, out);
      next.emplace(u, std::move(out));
    }
    prev = std::move(next);
  }

  res.logits = prev.at(v);
  res.label = static_cast<Label>(std::max_element(res.logits.begin(), res.logits.end()) - res.logits.begin());
  return res;
}

}  // namespace tgs

namespace tgs {

Checkpoint to_checkpoint(const GcnParams& params) {
  Checkpoint c;
  c.kind = "gcn";
  c.metadata["num_layers"] = std::to_string(params.num_layers());
  for (Index l = 0; l < params.num_layers(); ++l) {
    c.blobs.emplace_back("weight." + std::to_string(l), params.weights[l]);
    c.blobs.emplace_back("bias." + std::to_string(l), params.biases[l]);
  }
  return c;
}

GcnParams gcn_params_from(const Checkpoint& ckpt) {
  if (ckpt.kind != "gcn") throw CheckpointError("expected a gcn checkpoint, got '" + ckpt.kind + "'");
  const auto layers = static_cast<Index>(std::stoull(ckpt.meta("num_layers")));
  if (layers == 0) throw CheckpointError("gcn checkpoint has no layers");
  GcnParams p;
  for (Index l = 0; l < layers; ++l) {
    const Matrix& w = ckpt.blob("weight." + std::to_string(l));
    const Matrix& b = ckpt.blob("bias." + std::to_string(l));
    if (b.rows() != 1 || b.cols() != w.cols()) throw CheckpointError("gcn bias " + std::to_string(l) + " has the wrong shape");
    if (l > 0 && w.rows() != p.weights.back().cols()) {
      throw CheckpointError("gcn weight " + std::to_string(l) + " does not chain with the previous layer");
    }
    p.weights.push_back(w);
    p.biases.push_back(b);
  }
  return p;
}

}  // namespace tgs
