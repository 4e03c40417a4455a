#include "tgs/graph/graph_store.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "tgs/graph/dataset.hpp"

namespace tgs {

namespace {

void validate_split(const SplitMasks& split, std::span<const Label> labels, Index num_classes) {
  const Index n = labels.size();
  if (split.train.size() != n || split.val.size() != n || split.test.size() != n) {
    throw DatasetError(DatasetErrorKind::InvalidSplit, "mask length differs from node count");
  }
  for (Index i = 0; i < n; ++i) {
    const int members = (split.train[i] != 0) + (split.val[i] != 0) + (split.test[i] != 0);
    if (members > 1) {
      throw DatasetError(DatasetErrorKind::InvalidSplit, "node " + std::to_string(i) + " is in more than one split");
    }
    if (split.train[i] != 0 && (labels[i] < 0 || static_cast<Index>(labels[i]) >= num_classes)) {
      throw DatasetError(DatasetErrorKind::InvalidSplit, "train node " + std::to_string(i) + " has no valid label");
    }
  }
}

}  // namespace

GraphStore GraphStore::build(Matrix features, std::span<const Edge> edges, std::vector<Label> labels,
                             Index num_classes, std::optional<SplitMasks> split, BuildStats* stats) {
  const Index n = labels.size();
  if (features.rows() != n) {
    throw DatasetError(DatasetErrorKind::FeatureRowMismatch, "feature rows " + std::to_string(features.rows()) +
                                                                 " != node count " + std::to_string(n));
  }
  if (num_classes == 0) throw DatasetError(DatasetErrorKind::MalformedHeader, "class count must be positive");
  for (Index i = 0; i < n; ++i) {
    if (labels[i] < kUnlabeled || labels[i] >= static_cast<Label>(num_classes)) {
      throw DatasetError(DatasetErrorKind::LabelOutOfRange, "node " + std::to_string(i) + " has label " +
                                                                std::to_string(labels[i]) + " outside [0," +
                                                                std::to_string(num_classes) + ")");
    }
  }

  BuildStats local;
  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw DatasetError(DatasetErrorKind::DanglingEdge, "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                                             ") references a node >= " + std::to_string(n));
    }
    if (e.u == e.v) {
      ++local.self_loops_dropped;
      continue;
    }
    directed.push_back({e.u, e.v});
    directed.push_back({e.v, e.u});
  }
  std::sort(directed.begin(), directed.end());
  const Index before = directed.size();
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());
  local.duplicates_dropped = (before - directed.size()) / 2;

  auto adj = std::make_shared<Adjacency>();
  adj->offsets.assign(n + 1, 0);
  adj->columns.reserve(directed.size());
  for (const Edge& e : directed) {
    ++adj->offsets[e.u + 1];
    adj->columns.push_back(e.v);
  }
  std::partial_sum(adj->offsets.begin(), adj->offsets.end(), adj->offsets.begin());

  if (split) validate_split(*split, labels, num_classes);

  GraphStore g;
  g.num_classes_ = num_classes;
  g.features_ = std::make_shared<const Matrix>(std::move(features));
  g.labels_ = std::make_shared<const std::vector<Label>>(std::move(labels));
  g.adjacency_ = std::move(adj);
  if (split) g.split_ = std::make_shared<const SplitMasks>(std::move(*split));
  if (stats != nullptr) *stats = local;
  return g;
}

const SplitMasks& GraphStore::split() const {
  if (!split_) throw std::logic_error("GraphStore has no split attached");
  return *split_;
}

std::span<const NodeId> GraphStore::neighbors(NodeId v) const {
  if (v >= num_nodes()) {
    throw std::out_of_range("node id " + std::to_string(v) + " out of range (N=" + std::to_string(num_nodes()) + ")");
  }
  const auto& a = *adjacency_;
  return {a.columns.data() + a.offsets[v], a.offsets[v + 1] - a.offsets[v]};
}

Index GraphStore::degree(NodeId v) const { return neighbors(v).size(); }

bool GraphStore::has_edge(NodeId u, NodeId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> GraphStore::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.push_back({u, v});
  return out;
}

GraphStore GraphStore::with_split(SplitMasks split) const {
  validate_split(split, *labels_, num_classes_);
  GraphStore g = *this;
  g.split_ = std::make_shared<const SplitMasks>(std::move(split));
  return g;
}

GraphStore GraphStore::with_labels(std::vector<Label> labels) const {
  if (labels.size() != num_nodes()) throw DatasetError(DatasetErrorKind::LabelOutOfRange, "label count mismatch");
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels[i] < kUnlabeled || labels[i] >= static_cast<Label>(num_classes_)) {
      throw DatasetError(DatasetErrorKind::LabelOutOfRange, "node " + std::to_string(i) + " label out of range");
    }
  }
  if (split_) validate_split(*split_, labels, num_classes_);
  GraphStore g = *this;
  g.labels_ = std::make_shared<const std::vector<Label>>(std::move(labels));
  return g;
}

std::vector<double> degree_distribution(const GraphStore& g) {
  if (g.num_edges() == 0) throw std::invalid_argument("degree_distribution: graph has no edges");
  const double total = static_cast<double>(g.columns().size());
  std::vector<double> p(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) p[v] = static_cast<double>(g.degree(v)) / total;
  return p;
}

std::vector<NodeId> mask_nodes(const Mask& mask) {
  std::vector<NodeId> out;
  for (Index i = 0; i < mask.size(); ++i)
    if (mask[i] != 0) out.push_back(static_cast<NodeId>(i));
  return out;
}

}  // namespace tgs
