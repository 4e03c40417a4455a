#pragma once

// Gradient-check fixtures shared by the unit tests and the acceptance run.

#include <string>
#include <utility>
#include <vector>

#include "../support.hpp"
#include "oracles.hpp"
#include "tgs/model/model.hpp"
#include "tgs/sampler/sampler.hpp"

namespace tgs::oracle {

/// Init plus non-trivial batch-norm affine/running values and head biases.
inline TgsParams random_params(const ModelShape& shape, Rng& rng) {
  TgsParams p = TgsParams::init(shape, rng);
  for (auto& bn : p.norms) {
    for (double& v : bn.scale.values()) v = rng.uniform(0.5, 1.5);
    for (double& v : bn.shift.values()) v = rng.uniform(-0.3, 0.3);
    for (double& v : bn.running_mean.values()) v = rng.uniform(0.0, 0.5);
    for (double& v : bn.running_var.values()) v = rng.uniform(0.5, 2.0);
  }
  for (double& v : p.bias_f.values()) v = rng.uniform(-0.2, 0.2);
  for (double& v : p.bias_g.values()) v = rng.uniform(-0.2, 0.2);
  return p;
}

/// Full training loss (label + α·feature) on a training-mode forward with a
/// fixed dropout stream.
struct GradientCase {
  GraphStore graph;
  TgsParams params;
  EdgeBatch batch;
  double alpha = 0.8;
  ForwardOptions opts;
  FeatureLossOptions feat;

  double loss(TgsParams& p, HeadGradients* hg, ForwardBundle* keep) const {
    Rng stream(99);
    ForwardBundle bundle =
        forward_batch(p, SparseRows::from_dense(graph.features()), batch, ForwardMode::Train, opts, stream);
    HeadGradients local = HeadGradients::zeros_for(bundle);
    HeadGradients* g = hg != nullptr ? &local : nullptr;
    const double f = feature_loss_batch(bundle, batch, feat, g, alpha);
    const double l = label_loss_batch(bundle, batch, graph.labels(), graph.split().train, true, g, 1.0);
    if (hg != nullptr) *hg = std::move(local);
    if (keep != nullptr) *keep = std::move(bundle);
    return total_loss(f, l, alpha);
  }
};

/// Random 6-node, 8-edge graph with every edge in one batch and two
/// negatives per endpoint.
inline GradientCase make_case(std::uint64_t seed, MixupMode mode, bool normalize) {
  Rng rng(seed);
  GradientCase c{testing::random_graph(6, 8, 5, 3, rng), {}, {}, 0.8, {}, {}};
  c.params = random_params({5, 4, 3, 2}, rng);
  c.opts.dropout = 0.25;
  c.opts.mixup = mode;
  c.feat.normalize_positive_term = normalize;
  Rng sampler(seed + 1);
  auto batches = epoch_batches(c.graph, 8, sampler);
  c.batch = batches.front();
  NegativeOptions neg;
  neg.per_endpoint = 2;
  draw_negatives(c.batch, NegativeDist::uniform(6), sampler, neg);
  return c;
}

/// Relative error between analytic and central-difference gradients per
/// trainable parameter group.
inline std::vector<std::pair<std::string, double>> gradient_errors(const GradientCase& c) {
  HeadGradients hg;
  ForwardBundle bundle;
  TgsParams work = c.params;
  c.loss(work, &hg, &bundle);
  TgsParams grads = c.params.zeros_like();
  backward_batch(work, bundle, hg, grads);

  TgsParams probe = c.params;
  auto analytic = grads.trainable();
  auto numeric = probe.trainable();
  std::vector<std::pair<std::string, double>> out;
  for (Index k = 0; k < analytic.size(); ++k) {
    const Matrix fd = finite_difference(*numeric[k].value, [&] {
      TgsParams copy = probe;
      return c.loss(copy, nullptr, nullptr);
    });
    out.emplace_back(numeric[k].name, relative_error(*analytic[k].value, fd));
  }
  return out;
}

}  // namespace tgs::oracle
