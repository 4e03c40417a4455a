#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tgs/numeric/losses.hpp"
#include "tgs/numeric/matrix.hpp"

namespace tgs {

using NodeId = std::uint32_t;
/// Per-node boolean mask (0/1).
using Mask = std::vector<std::uint8_t>;

/// Label value for nodes without a known class.
inline constexpr Label kUnlabeled = -1;

struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct SplitMasks {
  Mask train;
  Mask val;
  Mask test;
};

/// Counts of input edges removed while building the CSR.
struct BuildStats {
  Index self_loops_dropped = 0;
  Index duplicates_dropped = 0;
};

/// Immutable attributed graph: features, symmetric CSR adjacency without
/// self-loops or duplicates, labels, and an optional train/val/test split.
///
/// Copies share the underlying buffers; the with_* helpers return a new
/// store that replaces one component.
class GraphStore {
 public:
  /// Validates and builds a store. Edges are symmetrized and deduplicated and
  /// self-loops are dropped. Throws DatasetError on dangling endpoints,
  /// out-of-range labels, feature row mismatch or an inconsistent split.
  static GraphStore build(Matrix features, std::span<const Edge> edges, std::vector<Label> labels,
                          Index num_classes, std::optional<SplitMasks> split = std::nullopt,
                          BuildStats* stats = nullptr);

  Index num_nodes() const { return labels_->size(); }
  Index num_classes() const { return num_classes_; }
  Index feature_dim() const { return features_->cols(); }
  /// Number of undirected edges.
  Index num_edges() const { return adjacency_->columns.size() / 2; }

  const Matrix& features() const { return *features_; }
  std::span<const Label> labels() const { return *labels_; }
  bool has_split() const { return split_ != nullptr; }
  /// Throws std::logic_error when no split is attached.
  const SplitMasks& split() const;

  /// Sorted neighbor ids; a view into the CSR columns.
  std::span<const NodeId> neighbors(NodeId v) const;
  Index degree(NodeId v) const;
  std::span<const std::size_t> row_offsets() const { return adjacency_->offsets; }
  std::span<const NodeId> columns() const { return adjacency_->columns; }
  bool has_edge(NodeId u, NodeId v) const;

  /// Each undirected edge once as (u, v) with u < v, lexicographically sorted.
  std::vector<Edge> edge_list() const;

  GraphStore with_split(SplitMasks split) const;
  GraphStore with_labels(std::vector<Label> labels) const;

 private:
  struct Adjacency {
    std::vector<std::size_t> offsets;
    std::vector<NodeId> columns;
  };

  GraphStore() = default;

  Index num_classes_ = 0;
  std::shared_ptr<const Matrix> features_;
  std::shared_ptr<const std::vector<Label>> labels_;
  std::shared_ptr<const Adjacency> adjacency_;
  std::shared_ptr<const SplitMasks> split_;
};

/// P(v) = deg(v) / Σ deg. Throws std::invalid_argument on an edgeless graph.
std::vector<double> degree_distribution(const GraphStore& g);

/// Node ids whose mask entry is set, ascending.
std::vector<NodeId> mask_nodes(const Mask& mask);

}  // namespace tgs
