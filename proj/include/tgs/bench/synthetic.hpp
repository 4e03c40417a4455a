#pragma once

#include <vector>

#include "tgs/graph/graph_store.hpp"
#include "tgs/numeric/rng.hpp"

namespace tgs {

enum class SyntheticModel {
  /// Ring backbone plus uniformly random chords.
  RegularRandom,
  /// Preferential attachment plus degree-biased extra edges.
  PowerLaw,
};

struct SyntheticSpec {
  Index nodes = 1000;
  double avg_degree = 10.0;  // R
  SyntheticModel model = SyntheticModel::RegularRandom;
  Index feature_dim = 16;
  Index classes = 4;
  Index train_per_class = 20;
};

/// Connected undirected graph whose average degree is within 5% of R
/// (exact up to rounding of N·R/2 edges). R = 2 yields a plain ring.
/// Gaussian features, uniform labels, and a split of train_per_class train
/// nodes per class with the remainder halved into val/test.
/// Throws std::invalid_argument unless N ≥ 3 and 2 ≤ R < N.
GraphStore gen_synthetic(const SyntheticSpec& spec, Rng& rng);

/// Tree in which every node within `depth` hops of node 0 has exactly R
/// neighbors: the root gets R children and every other inner node R−1.
/// Leaves sit at distance `depth` from the root. No split is attached.
GraphStore regular_tree(Index r, Index depth, Index feature_dim, Index classes, Rng& rng);

/// Bag-of-words citation-style graph with community structure.
struct CitationSpec {
  std::vector<Index> class_sizes{818, 426, 418, 351, 298, 217, 180};
  Index feature_dim = 1433;
  Index edges = 5278;
  double homophily = 0.85;       // fraction of edges within a class
  double words_mean = 18.0;      // active words per node
  double words_sd = 5.5;
  double topic_fraction = 0.90;  // share of a node's words drawn from its class topic
  double topic_sharpness = 2.0;  // spread of the per-class word preferences
  double degree_exponent = 2.5;  // Pareto tail of the expected-degree weights
  /// Each class splits into communities whose topic drifts toward another
  /// class by a factor drawn from U(0, drift_max); within-class edges stay
  /// inside the community with probability community_affinity.
  Index community_size = 40;
  double drift_max = 0.8;
  double community_affinity = 0.9;
  /// Share of topical words drawn from a community's own vocabulary.
  double community_words = 0.35;
  Index train_per_class = 20;
  Index val_size = 500;
  Index test_size = 1000;
};

/// Deterministic in (spec, rng state). No isolated nodes; binary features.
GraphStore citation_like(const CitationSpec& spec, Rng& rng);

/// The default CitationSpec drawn with a fixed seed: the Cora-shaped graph
/// used when no real dataset is available.
GraphStore cora_standin();

/// Fraction of edges whose endpoints share a label.
double edge_homophily(const GraphStore& g);

}  // namespace tgs
