#include "tgs/eval/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tgs/error.hpp"

namespace tgs {

double accuracy(std::span<const Label> predictions, std::span<const Label> labels, const Mask& mask) {
  if (predictions.size() != labels.size() || mask.size() != labels.size()) {
    throw DimensionError("accuracy: predictions, labels and mask must have equal length");
  }
  Index total = 0, correct = 0;
  for (Index i = 0; i < mask.size(); ++i) {
    if (mask[i] == 0) continue;
    ++total;
    if (predictions[i] == labels[i]) ++correct;
  }
  if (total == 0) throw std::invalid_argument("accuracy: mask selects no nodes");
  return static_cast<double>(correct) / static_cast<double>(total);
}

double mean_hop_cosine(const Matrix& embeddings, const GraphStore& g, int hop) {
  if (hop != 1 && hop != 2) throw std::invalid_argument("mean_hop_cosine: hop must be 1 or 2");
  const Index n = g.num_nodes();
  if (embeddings.rows() != n) throw DimensionError("mean_hop_cosine: one embedding row per node required");

  std::vector<double> norm(n);
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : embeddings.row(i)) s += v * v;
    norm[i] = std::sqrt(s);
  }
  const auto cosine = [&](Index a, Index b) {
    if (norm[a] == 0.0 || norm[b] == 0.0) return 0.0;
    const auto ra = embeddings.row(a);
    const auto rb = embeddings.row(b);
    double dot = 0.0;
    for (Index k = 0; k < ra.size(); ++k) dot += ra[k] * rb[k];
    return dot / (norm[a] * norm[b]);
  };

  // stamp[v] == i marks v as self or a 1-hop neighbor of i; seen2 dedups 2-hop nodes
  std::vector<Index> stamp(n, n), seen2(n, n);
  double total = 0.0;
  Index counted = 0;
  for (Index i = 0; i < n; ++i) {
    const auto nbrs = g.neighbors(static_cast<NodeId>(i));
    double sum = 0.0;
    Index m = 0;
    if (hop == 1) {
      for (NodeId j : nbrs) sum += cosine(i, j);
      m = nbrs.size();
    } else {
      stamp[i] = i;
      for (NodeId j : nbrs) stamp[j] = i;
      for (NodeId j : nbrs)
        for (NodeId k : g.neighbors(j)) {
          if (stamp[k] == i || seen2[k] == i) continue;
          seen2[k] = i;
          sum += cosine(i, k);
          ++m;
        }
    }
    if (m == 0) continue;
    total += sum / static_cast<double>(m);
    ++counted;
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

}  // namespace tgs
