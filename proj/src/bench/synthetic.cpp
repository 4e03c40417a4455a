#include "tgs/bench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tgs {

namespace {

using EdgeSet = std::set<std::pair<NodeId, NodeId>>;

bool add_edge(EdgeSet& set, NodeId u, NodeId v) {
  if (u == v) return false;
  if (u > v) std::swap(u, v);
  return set.insert({u, v}).second;
}

std::vector<Edge> to_edges(const EdgeSet& set) {
  std::vector<Edge> out;
  out.reserve(set.size());
  for (auto [u, v] : set) out.push_back({u, v});
  return out;
}

/// Draws from a cumulative weight table.
NodeId draw(const std::vector<double>& cumulative, Rng& rng) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return static_cast<NodeId>(std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                                   cumulative.size() - 1));
}

SplitMasks per_class_split(std::span<const Label> labels, Index classes, Index per_class, Index val_size,
                           Index test_size, Rng& rng) {
  const Index n = labels.size();
  std::vector<NodeId> order(n);
  for (NodeId v = 0; v < n; ++v) order[v] = v;
  for (Index i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  SplitMasks s{Mask(n, 0), Mask(n, 0), Mask(n, 0)};
  std::vector<Index> taken(classes, 0);
  std::vector<NodeId> rest;
  for (NodeId v : order) {
    const auto c = static_cast<Index>(labels[v]);
    if (taken[c] < per_class) {
      ++taken[c];
      s.train[v] = 1;
    } else {
      rest.push_back(v);
    }
  }
  if (val_size + test_size > rest.size()) {
    val_size = rest.size() / 2;
    test_size = rest.size() - val_size;
  }
  for (Index i = 0; i < val_size; ++i) s.val[rest[i]] = 1;
  for (Index i = val_size; i < val_size + test_size; ++i) s.test[rest[i]] = 1;
  return s;
}

Matrix gaussian_features(Index n, Index d, Rng& rng) {
  Matrix x(n, d);
  for (double& v : x.values()) v = rng.normal();
  return x;
}

}  // namespace

GraphStore gen_synthetic(const SyntheticSpec& spec, Rng& rng) {
  const Index n = spec.nodes;
  if (n < 3) throw std::invalid_argument("gen_synthetic: need at least 3 nodes");
  if (!(spec.avg_degree >= 2.0 && spec.avg_degree < static_cast<double>(n))) {
    throw std::invalid_argument("gen_synthetic: average degree must satisfy 2 <= R < N");
  }
  if (spec.classes == 0) throw std::invalid_argument("gen_synthetic: need at least one class");
  const auto target = static_cast<Index>(std::llround(static_cast<double>(n) * spec.avg_degree / 2.0));

  EdgeSet set;
  if (spec.model == SyntheticModel::RegularRandom) {
    for (NodeId v = 0; v < n; ++v) add_edge(set, v, static_cast<NodeId>((v + 1) % n));
    while (set.size() < target) {
      add_edge(set, static_cast<NodeId>(rng.below(n)), static_cast<NodeId>(rng.below(n)));
    }
  } else {
    // preferential attachment with m = ⌊R/2⌋ links per arriving node; the
    // endpoint list doubles as a degree-proportional sampling table
    const Index m = std::max<Index>(1, static_cast<Index>(spec.avg_degree / 2.0));
    std::vector<NodeId> ends;
    const Index seed_nodes = m + 1;
    for (NodeId u = 0; u < seed_nodes; ++u)
      for (NodeId v = u + 1; v < seed_nodes; ++v)
        if (add_edge(set, u, v)) ends.insert(ends.end(), {u, v});
    for (NodeId v = static_cast<NodeId>(seed_nodes); v < n; ++v) {
      Index linked = 0;
      for (Index tries = 0; linked < m && tries < 50 * m; ++tries) {
        const NodeId u = ends[rng.below(ends.size())];
        if (add_edge(set, u, v)) {
          ends.insert(ends.end(), {u, v});
          ++linked;
        }
      }
    }
    while (set.size() < target) {
      const NodeId u = ends[rng.below(ends.size())];
      const auto v = static_cast<NodeId>(rng.below(n));
      if (add_edge(set, u, v)) ends.insert(ends.end(), {u, v});
    }
  }

  std::vector<Label> labels(n);
  for (auto& l : labels) l = static_cast<Label>(rng.below(spec.classes));
  const Index rest = n - std::min(n, spec.classes * spec.train_per_class);
  SplitMasks split = per_class_split(labels, spec.classes, spec.train_per_class, rest / 2, rest - rest / 2, rng);
  Matrix x = gaussian_features(n, spec.feature_dim, rng);
  const auto edges = to_edges(set);
  return GraphStore::build(std::move(x), edges, std::move(labels), spec.classes, std::move(split));
}

GraphStore regular_tree(Index r, Index depth, Index feature_dim, Index classes, Rng& rng) {
  if (r < 2) throw std::invalid_argument("regular_tree: R must be >= 2");
  if (classes == 0) throw std::invalid_argument("regular_tree: need at least one class");
  std::vector<Edge> edges;
  std::vector<NodeId> frontier{0};
  NodeId next = 1;
  for (Index level = 0; level < depth; ++level) {
    std::vector<NodeId> children;
    for (NodeId parent : frontier) {
      const Index fan = parent == 0 ? r : r - 1;
      for (Index k = 0; k < fan; ++k) {
        edges.push_back({parent, next});
        children.push_back(next++);
      }
    }
    frontier = std::move(children);
  }
  const Index n = next;
  std::vector<Label> labels(n);
  for (auto& l : labels) l = static_cast<Label>(rng.below(classes));
  Matrix x = gaussian_features(n, feature_dim, rng);
  return GraphStore::build(std::move(x), edges, std::move(labels), classes);
}

GraphStore citation_like(const CitationSpec& spec, Rng& rng) {
  const Index classes = spec.class_sizes.size();
  if (classes < 2) throw std::invalid_argument("citation_like: need at least two classes");
  Index n = 0;
  for (Index s : spec.class_sizes) n += s;
  const Index d = spec.feature_dim;
  if (d < 2 || n < 2) throw std::invalid_argument("citation_like: degenerate size");

  // labels in shuffled order so class blocks are not contiguous
  std::vector<Label> labels;
  for (Index c = 0; c < classes; ++c) labels.insert(labels.end(), spec.class_sizes[c], static_cast<Label>(c));
  for (Index i = n; i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);

  // word distributions: Zipf background, soft per-class topics
  std::vector<double> background(d);
  for (Index w = 0; w < d; ++w) background[w] = 1.0 / std::pow(static_cast<double>(w + 1), 0.8);
  std::vector<Index> word_perm(d);
  for (Index w = 0; w < d; ++w) word_perm[w] = w;
  for (Index i = d; i > 1; --i) std::swap(word_perm[i - 1], word_perm[rng.below(i)]);
  std::vector<double> bg_cum(d);
  double acc = 0.0;
  for (Index w = 0; w < d; ++w) bg_cum[w] = (acc += background[word_perm[w]]);
  std::vector<std::vector<double>> topic(classes, std::vector<double>(d));
  for (Index c = 0; c < classes; ++c) {
    double total = 0.0;
    for (Index w = 0; w < d; ++w) total += (topic[c][w] = std::exp(spec.topic_sharpness * rng.normal()));
    for (double& t : topic[c]) t /= total;
  }

  // communities: consecutive members of each class, each with a drifted topic
  std::vector<std::vector<NodeId>> members(classes);
  for (NodeId v = 0; v < n; ++v) members[static_cast<Index>(labels[v])].push_back(v);
  std::vector<Index> community(n);
  std::vector<std::vector<NodeId>> community_members;
  std::vector<std::vector<double>> community_cum;
  const Index csize = std::max<Index>(1, spec.community_size);
  for (Index c = 0; c < classes; ++c) {
    const Index count = std::max<Index>(1, members[c].size() / csize);
    const Index first = community_members.size();
    for (Index k = 0; k < count; ++k) {
      const double drift = spec.drift_max * rng.uniform();
      Index other = rng.below(classes - 1);
      if (other >= c) ++other;
      std::vector<double> cum(d);
      acc = 0.0;
      std::vector<double> own(d);
      double own_total = 0.0;
      for (double& o : own) own_total += (o = std::exp(spec.topic_sharpness * rng.normal()));
      const double cw = spec.community_words;
      for (Index w = 0; w < d; ++w) {
        const double mix = (1.0 - drift) * topic[c][w] + drift * topic[other][w];
        cum[w] = (acc += (1.0 - cw) * mix + cw * own[w] / own_total);
      }
      community_cum.push_back(std::move(cum));
      community_members.emplace_back();
    }
    for (Index i = 0; i < members[c].size(); ++i) {
      const Index k = first + std::min(count - 1, i * count / members[c].size());
      community[members[c][i]] = k;
      community_members[k].push_back(members[c][i]);
    }
  }

  Matrix x(n, d);
  for (Index v = 0; v < n; ++v) {
    const auto words = static_cast<Index>(
        std::clamp<double>(std::round(spec.words_mean + spec.words_sd * rng.normal()), 1.0, static_cast<double>(d)));
    Index placed = 0;
    for (Index tries = 0; placed < words && tries < 20 * words; ++tries) {
      const bool topical = rng.bernoulli(spec.topic_fraction);
      const NodeId w = topical ? draw(community_cum[community[v]], rng) : draw(bg_cum, rng);
      const Index col = topical ? w : word_perm[w];
      if (x(v, col) == 0.0) {
        x(v, col) = 1.0;
        ++placed;
      }
    }
  }

  // degree-corrected planted partition
  std::vector<double> weight(n);
  for (double& w : weight) w = std::pow(1.0 - rng.uniform(), -1.0 / (spec.degree_exponent - 1.0));
  std::vector<double> all_cum(n);
  acc = 0.0;
  for (Index v = 0; v < n; ++v) all_cum[v] = (acc += weight[v]);
  std::vector<std::vector<double>> class_cum(classes);
  for (Index c = 0; c < classes; ++c) {
    acc = 0.0;
    for (NodeId v : members[c]) class_cum[c].push_back(acc += weight[v]);
  }
  std::vector<std::vector<double>> comm_weight_cum(community_members.size());
  for (Index k = 0; k < community_members.size(); ++k) {
    acc = 0.0;
    for (NodeId v : community_members[k]) comm_weight_cum[k].push_back(acc += weight[v]);
  }
  const auto partner = [&](NodeId u) -> NodeId {
    const auto c = static_cast<Index>(labels[u]);
    if (rng.bernoulli(spec.homophily)) {
      if (rng.bernoulli(spec.community_affinity)) {
        const Index k = community[u];
        return community_members[k][draw(comm_weight_cum[k], rng)];
      }
      return members[c][draw(class_cum[c], rng)];
    }
    for (;;) {
      const NodeId v = draw(all_cum, rng);
      if (labels[v] != labels[u]) return v;
    }
  };

  EdgeSet set;
  std::vector<Index> degree(n, 0);
  const auto link = [&](NodeId u, NodeId v) {
    if (add_edge(set, u, v)) {
      ++degree[u];
      ++degree[v];
    }
  };
  // one edge per node first so none is isolated, then weight-driven edges
  for (NodeId u = 0; u < n; ++u)
    while (degree[u] == 0) link(u, partner(u));
  while (set.size() < spec.edges) {
    const NodeId u = draw(all_cum, rng);
    link(u, partner(u));
  }

  SplitMasks split = per_class_split(labels, classes, spec.train_per_class, spec.val_size, spec.test_size, rng);
  const auto edges = to_edges(set);
  return GraphStore::build(std::move(x), edges, std::move(labels), classes, std::move(split));
}

GraphStore cora_standin() {
  Rng rng(2024);
  return citation_like(CitationSpec{}, rng);
}

double edge_homophily(const GraphStore& g) {
  const auto edges = g.edge_list();
  if (edges.empty()) throw std::invalid_argument("edge_homophily: graph has no edges");
  Index same = 0;
  for (const Edge& e : edges) same += g.labels()[e.u] == g.labels()[e.v];
  return static_cast<double>(same) / static_cast<double>(edges.size());
}

}  // namespace tgs
