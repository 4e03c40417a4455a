#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "tgs/graph/graph_store.hpp"
#include "tgs/model/checkpoint.hpp"
#include "tgs/numeric/rng.hpp"
#include "tgs/numeric/sparse.hpp"
#include "tgs/train/config.hpp"
#include "tgs/train/report.hpp"

namespace tgs {

/// D^{-1/2}(A + I)D^{-1/2} in CSR form: each row holds the node itself and its
/// neighbors (ascending) with coefficient 1/√((d_i+1)(d_j+1)).
struct NormalizedAdjacency {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> columns;
  std::vector<double> coefficients;

  static NormalizedAdjacency from(const GraphStore& g);
  Index num_nodes() const { return offsets.size() - 1; }
  /// out = Â · m
  Matrix propagate(const Matrix& m) const;
};

/// weights[0]: d×F, weights[l]: F×F, weights[L−1]: F×C; one 1×cols bias each.
struct GcnParams {
  std::vector<Matrix> weights;
  std::vector<Matrix> biases;

  static GcnParams init(Index input_dim, Index hidden, Index classes, Index layers, Rng& rng);
  Index num_layers() const { return weights.size(); }
  Index input_dim() const { return weights.front().rows(); }
  Index num_classes() const { return weights.back().cols(); }
};

/// Blobs `weight.l` / `bias.l`, kind "gcn".
Checkpoint to_checkpoint(const GcnParams& params);
/// Throws CheckpointError on a kind or shape mismatch.
GcnParams gcn_params_from(const Checkpoint& ckpt);

struct GcnConfig {
  double lr = 0.01;
  double weight_decay = 5e-4;  // on the first layer's weights
  Index epochs = 200;
  Index hidden = 16;
  Index layers = 2;
  double dropout = 0.5;  // on the layer inputs during training
  std::uint64_t seed = 0;
  bool normalize_features = true;

  void validate() const;
  bool set(const std::string& key, const std::string& value);
  ConfigEntries entries() const;
};

/// L rounds of H ← Â H W + b with ReLU between rounds; returns N×C logits.
Matrix gcn_full_forward(const GcnParams& params, const NormalizedAdjacency& adj, const SparseRows& x);

struct GcnTrainResult {
  GcnParams params;  // best-validation snapshot
  RunReport report;
};

/// Full-batch Adam on the train-node cross-entropy, evaluated every epoch.
GcnTrainResult gcn_train(const GraphStore& g, const GcnConfig& cfg);

/// Hidden rows kept across single-node requests (the memoized variant).
struct GcnReuseCache {
  /// layers[l] maps a node to its layer-l output row (l = 0 is the raw
  /// feature row, as fetched).
  std::vector<std::unordered_map<NodeId, std::vector<double>>> layers;
};

struct SingleNodeResult {
  std::vector<double> logits;
  Label label = 0;
  /// Node-feature rows materialized for this request.
  Index fetches = 0;
  /// Neighbor lists read while expanding the computation tree.
  Index adjacency_reads = 0;
};

/// Predicts node v from its L-hop neighborhood only. The computation tree is
/// expanded layer by layer with each layer's frontier deduplicated, so the
/// fetch count is the number of distinct nodes within L hops of v. With a
/// reuse cache, rows computed by earlier requests are not fetched again.
/// Throws std::out_of_range for an invalid node.
SingleNodeResult gcn_infer_single_node(const GcnParams& params, const GraphStore& g, const NormalizedAdjacency& adj,
                                       const SparseRows& x, NodeId v, GcnReuseCache* reuse = nullptr);

}  // namespace tgs
