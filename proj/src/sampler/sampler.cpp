#include "tgs/sampler/sampler.hpp"

#include <algorithm>
#include <stdexcept>

namespace tgs {

NegativeDist NegativeDist::uniform(Index num_nodes) {
  if (num_nodes == 0) throw std::invalid_argument("NegativeDist::uniform: no nodes");
  NegativeDist d;
  d.kind_ = NegativeKind::Uniform;
  d.num_nodes_ = num_nodes;
  return d;
}

NegativeDist NegativeDist::degree(const GraphStore& g) {
  const auto p = degree_distribution(g);
  NegativeDist d;
  d.kind_ = NegativeKind::Degree;
  d.num_nodes_ = p.size();
  d.cumulative_.resize(p.size());
  double acc = 0.0;
  for (Index v = 0; v < p.size(); ++v) {
    acc += p[v];
    d.cumulative_[v] = acc;
  }
  d.cumulative_.back() = 1.0;
  return d;
}

double NegativeDist::probability(NodeId v) const {
  if (v >= num_nodes_) throw std::out_of_range("NegativeDist::probability: node out of range");
  if (kind_ == NegativeKind::Uniform) return 1.0 / static_cast<double>(num_nodes_);
  return cumulative_[v] - (v == 0 ? 0.0 : cumulative_[v - 1]);
}

NodeId NegativeDist::draw(Rng& rng) const {
  if (kind_ == NegativeKind::Uniform) return static_cast<NodeId>(rng.below(num_nodes_));
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return static_cast<NodeId>(std::min<Index>(static_cast<Index>(it - cumulative_.begin()), num_nodes_ - 1));
}

std::vector<EdgeBatch> epoch_batches(const GraphStore& g, Index batch_size, Rng& rng) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  std::vector<Edge> edges = g.edge_list();
  for (Index i = edges.size(); i > 1; --i) std::swap(edges[i - 1], edges[rng.below(i)]);

  std::vector<EdgeBatch> batches;
  for (Index start = 0; start < edges.size(); start += batch_size) {
    const Index end = std::min(edges.size(), start + batch_size);
    EdgeBatch b;
    b.edges.assign(edges.begin() + static_cast<std::ptrdiff_t>(start), edges.begin() + static_cast<std::ptrdiff_t>(end));
    b.positive_weights.assign(2 * b.edges.size(), 1.0 / static_cast<double>(b.edges.size()));
    batches.push_back(std::move(b));
  }
  return batches;
}

void draw_negatives(EdgeBatch& batch, const NegativeDist& dist, Rng& rng, const NegativeOptions& opts,
                    const GraphStore* g) {
  if (batch.edges.empty() || opts.per_endpoint == 0) return;
  if (opts.filter_collisions && g == nullptr) throw std::invalid_argument("collision filtering needs the graph");
  const double w = 1.0 / (static_cast<double>(batch.edges.size()) * static_cast<double>(opts.per_endpoint));
  batch.negatives.reserve(batch.negatives.size() + batch.edges.size() * 2 * opts.per_endpoint);
  for (std::uint32_t e = 0; e < batch.edges.size(); ++e) {
    for (Side side : {Side::First, Side::Second}) {
      const NodeId anchor = side == Side::First ? batch.edges[e].u : batch.edges[e].v;
      for (Index s = 0; s < opts.per_endpoint; ++s) {
        NodeId k = dist.draw(rng);
        if (opts.filter_collisions) {
          for (Index tries = 0; tries < opts.max_redraws && (k == anchor || g->has_edge(anchor, k)); ++tries) {
            k = dist.draw(rng);
          }
        }
        batch.negatives.push_back({e, side, k, w});
      }
    }
  }
}

EdgeBatch enumerate_full_graph_batch(const GraphStore& g) {
  const Index n = g.num_nodes();
  const double inv_n = 1.0 / static_cast<double>(n);
  EdgeBatch b;
  b.edges = g.edge_list();
  b.positive_weights.resize(2 * b.edges.size());
  for (std::uint32_t e = 0; e < b.edges.size(); ++e) {
    for (Side side : {Side::First, Side::Second}) {
      const NodeId anchor = side == Side::First ? b.edges[e].u : b.edges[e].v;
      const Index deg = g.degree(anchor);
      b.positive_weights[2 * e + static_cast<Index>(side)] = inv_n / static_cast<double>(deg);
      const Index m = n - deg - 1;
      if (m == 0) continue;
      const double w = inv_n / (static_cast<double>(m) * static_cast<double>(deg));
      for (NodeId k = 0; k < n; ++k) {
        if (k == anchor || g.has_edge(anchor, k)) continue;
        b.negatives.push_back({e, side, k, w});
      }
    }
  }
  return b;
}

}  // namespace tgs
