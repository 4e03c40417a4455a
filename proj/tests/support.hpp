#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "tgs/graph/graph_store.hpp"
#include "tgs/numeric/rng.hpp"

namespace tgs::testing {

/// Connected random graph: a random spanning tree plus extra edges until
/// `edges` undirected edges exist (capped at the complete graph). Dense
/// Gaussian features, labels in [0, classes), ~half the nodes in train.
inline GraphStore random_graph(Index nodes, Index edges, Index dim, Index classes, Rng& rng) {
  std::set<std::pair<NodeId, NodeId>> set;
  for (NodeId v = 1; v < nodes; ++v) {
    const auto u = static_cast<NodeId>(rng.below(v));
    set.insert({u, v});
  }
  const Index cap = nodes * (nodes - 1) / 2;
  edges = std::min(edges, cap);
  while (set.size() < edges) {
    auto u = static_cast<NodeId>(rng.below(nodes));
    auto v = static_cast<NodeId>(rng.below(nodes));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    set.insert({u, v});
  }
  std::vector<Edge> list;
  for (auto [u, v] : set) list.push_back({u, v});
  Matrix x(nodes, dim);
  for (double& v : x.values()) v = rng.normal();
  std::vector<Label> labels(nodes);
  for (auto& l : labels) l = static_cast<Label>(rng.below(classes));
  SplitMasks split{Mask(nodes, 0), Mask(nodes, 0), Mask(nodes, 0)};
  for (Index v = 0; v < nodes; ++v) {
    const auto r = rng.below(3);
    (r == 0 ? split.train : r == 1 ? split.val : split.test)[v] = 1;
  }
  split.train[0] = 1;
  split.val[0] = split.test[0] = 0;
  return GraphStore::build(std::move(x), list, std::move(labels), classes, split);
}

}  // namespace tgs::testing
