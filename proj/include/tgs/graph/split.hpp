#pragma once

#include <cstdint>

#include "tgs/graph/graph_store.hpp"

namespace tgs {

enum class SplitMode {
  /// The split stored with the dataset.
  Standard,
  /// k labeled nodes per class. When the dataset carries a split the k nodes
  /// are drawn from its training set and val/test are kept; otherwise they are
  /// drawn from all nodes and val/test are sampled from the remainder.
  PerClass,
};

struct SplitSpec {
  SplitMode mode = SplitMode::Standard;
  Index per_class = 20;
  Index val_size = 500;
  Index test_size = 1000;
  std::uint64_t seed = 0;
};

/// Deterministic in (g, spec). Throws std::invalid_argument naming the class
/// when a class has fewer than k candidates, and when the standard split is
/// requested but absent or val/test sizes exceed the remaining nodes.
SplitMasks make_split(const GraphStore& g, const SplitSpec& spec);

struct NoiseSpec {
  double ratio = 0.0;  // r in [0, 1)
  std::uint64_t seed = 0;
};

/// Flips each train-masked label with probability r to a class drawn
/// uniformly from the other C−1 classes. Val/test labels are untouched.
GraphStore inject_label_noise(const GraphStore& g, const NoiseSpec& spec);

}  // namespace tgs
