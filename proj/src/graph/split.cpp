#include "tgs/graph/split.hpp"

#include <stdexcept>

#include "tgs/numeric/rng.hpp"

namespace tgs {

namespace {

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (Index i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

SplitMasks make_split(const GraphStore& g, const SplitSpec& spec) {
  if (spec.mode == SplitMode::Standard) {
    if (!g.has_split()) throw std::invalid_argument("standard split requested but the dataset carries none");
    return g.split();
  }

  const Index n = g.num_nodes();
  const Index classes = g.num_classes();
  const auto labels = g.labels();
  Rng rng(spec.seed);

  const bool within_stored = g.has_split();
  std::vector<std::vector<NodeId>> by_class(classes);
  for (NodeId v = 0; v < n; ++v) {
    if (labels[v] < 0) continue;
    if (within_stored && g.split().train[v] == 0) continue;
    by_class[static_cast<Index>(labels[v])].push_back(v);
  }

  SplitMasks out{Mask(n, 0), Mask(n, 0), Mask(n, 0)};
  for (Index c = 0; c < classes; ++c) {
    auto& pool = by_class[c];
    if (pool.size() < spec.per_class) {
      throw std::invalid_argument("class " + std::to_string(c) + " has " + std::to_string(pool.size()) +
                                  " candidate nodes, fewer than the " + std::to_string(spec.per_class) + " requested");
    }
    shuffle(pool, rng);
    for (Index k = 0; k < spec.per_class; ++k) out.train[pool[k]] = 1;
  }

  if (within_stored) {
    out.val = g.split().val;
    out.test = g.split().test;
    return out;
  }

  std::vector<NodeId> rest;
  for (NodeId v = 0; v < n; ++v)
    if (out.train[v] == 0) rest.push_back(v);
  if (spec.val_size + spec.test_size > rest.size()) {
    throw std::invalid_argument("val+test size " + std::to_string(spec.val_size + spec.test_size) + " exceeds the " +
                                std::to_string(rest.size()) + " nodes left after training selection");
  }
  shuffle(rest, rng);
  for (Index k = 0; k < spec.val_size; ++k) out.val[rest[k]] = 1;
  for (Index k = spec.val_size; k < spec.val_size + spec.test_size; ++k) out.test[rest[k]] = 1;
  return out;
}

GraphStore inject_label_noise(const GraphStore& g, const NoiseSpec& spec) {
  if (!(spec.ratio >= 0.0 && spec.ratio < 1.0)) throw std::invalid_argument("noise ratio must lie in [0,1)");
  if (spec.ratio > 0.0 && g.num_classes() < 2) throw std::invalid_argument("label noise needs at least two classes");
  std::vector<Label> labels(g.labels().begin(), g.labels().end());
  if (spec.ratio == 0.0) return g.with_labels(std::move(labels));
  const Mask& train = g.split().train;
  Rng rng(spec.seed);
  const auto classes = static_cast<std::uint64_t>(g.num_classes());
  for (Index v = 0; v < labels.size(); ++v) {
    if (train[v] == 0) continue;
    if (!rng.bernoulli(spec.ratio)) continue;
    // uniform over the C-1 other classes
    auto other = static_cast<Label>(rng.below(classes - 1));
    if (other >= labels[v]) ++other;
    labels[v] = other;
  }
  return g.with_labels(std::move(labels));
}

}  // namespace tgs
