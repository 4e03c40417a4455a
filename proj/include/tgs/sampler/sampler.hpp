#pragma once

#include <cstdint>
#include <vector>

#include "tgs/graph/graph_store.hpp"
#include "tgs/numeric/rng.hpp"

namespace tgs {

/// Which endpoint of a batch edge a term is anchored at.
enum class Side : std::uint8_t { First = 0, Second = 1 };

/// One dissimilarity term ‖ŷ_anchor − ẑ_node‖² with its loss weight.
struct NegativeTerm {
  std::uint32_t edge;  // index into EdgeBatch::edges
  Side side;           // anchor = edges[edge].u for First, .v for Second
  NodeId node;
  double weight;
};

/// A slice of undirected edges for one optimizer step plus the negatives
/// drawn for their endpoints.
///
/// Each edge contributes the two positive terms ‖y_u − z'_{u,v}‖² and
/// ‖y_v − z'_{v,u}‖², weighted by positive_weights[2e] and [2e+1]. The
/// sampler fills uniform weights 1/|E_b| (a mean over the batch);
/// full-graph enumeration uses per-node normalizers instead.
struct EdgeBatch {
  std::vector<Edge> edges;
  std::vector<double> positive_weights;
  std::vector<NegativeTerm> negatives;
};

enum class NegativeKind { Uniform, Degree };

/// Sampling distribution P_k(v) over nodes, backed by a cumulative table.
class NegativeDist {
 public:
  /// P(v) = 1/N.
  static NegativeDist uniform(Index num_nodes);
  /// P(v) = deg(v)/Σdeg. Throws on an edgeless graph.
  static NegativeDist degree(const GraphStore& g);

  NegativeKind kind() const { return kind_; }
  Index num_nodes() const { return num_nodes_; }
  double probability(NodeId v) const;
  NodeId draw(Rng& rng) const;

 private:
  NegativeKind kind_ = NegativeKind::Uniform;
  Index num_nodes_ = 0;
  std::vector<double> cumulative_;  // empty for uniform
};

/// Permutes the undirected edge set and chunks it into batches of at most
/// `batch_size` edges; every edge appears exactly once. Positive weights are
/// 1/|E_b|. Throws std::invalid_argument when batch_size == 0.
std::vector<EdgeBatch> epoch_batches(const GraphStore& g, Index batch_size, Rng& rng);

struct NegativeOptions {
  Index per_endpoint = 1;
  /// Redraw negatives that equal the anchor or neighbor it.
  bool filter_collisions = false;
  Index max_redraws = 64;
};

/// Appends `per_endpoint` independent draws for each endpoint of each edge,
/// each weighted 1/(|E_b|·per_endpoint) so the sum estimates the batch-mean
/// expectation. `g` is only consulted when filtering collisions.
void draw_negatives(EdgeBatch& batch, const NegativeDist& dist, Rng& rng, const NegativeOptions& opts,
                    const GraphStore* g = nullptr);

/// Every undirected edge in one batch with full-graph weights: the positive
/// term anchored at i weighted 1/(N·|N_i|), and for each incident edge every
/// non-neighbor k of the anchor enumerated with weight 1/(N·M_i·|N_i|), where
/// M_i = N − |N_i| − 1. Summed over i's incident edges this reproduces the
/// node-centric full-graph objective for every non-isolated node.
EdgeBatch enumerate_full_graph_batch(const GraphStore& g);

}  // namespace tgs
