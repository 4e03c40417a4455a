#pragma once

#include <span>

#include "tgs/graph/graph_store.hpp"
#include "tgs/numeric/matrix.hpp"

namespace tgs {

/// correct / total over nodes with mask set. Throws std::invalid_argument
/// when the mask selects nothing or sizes disagree.
double accuracy(std::span<const Label> predictions, std::span<const Label> labels, const Mask& mask);

/// Mean over nodes of the mean cosine similarity between a node's embedding
/// and those of nodes at exactly `hop` hops (hop ∈ {1, 2}; the 2-hop set
/// excludes self and 1-hop neighbors). Zero-norm pairs count as 0; nodes
/// with no partner at that distance are skipped.
double mean_hop_cosine(const Matrix& embeddings, const GraphStore& g, int hop);

}  // namespace tgs
