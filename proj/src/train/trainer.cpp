#include "tgs/train/trainer.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "tgs/eval/metrics.hpp"
#include "tgs/model/model.hpp"
#include "tgs/numeric/losses.hpp"
#include "tgs/sampler/sampler.hpp"
#include "tgs/train/adam.hpp"

namespace tgs {

namespace {

struct Evaluation {
  double train_ce = 0.0, val_ce = 0.0, train_acc = 0.0, val_acc = 0.0, test_acc = 0.0;
};

double masked_ce(const Matrix& logits, std::span<const Label> labels, const Mask& mask) {
  double total = 0.0;
  Index n = 0;
  for (Index i = 0; i < mask.size(); ++i) {
    if (mask[i] == 0 || labels[i] < 0) continue;
    total += cross_entropy_row(logits.row(i), labels[i]);
    ++n;
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

Evaluation evaluate(const TgsParams& params, const SparseRows& inputs, const GraphStore& g) {
  const Matrix logits = infer_logits(params, inputs);
  const auto preds = argmax_rows(logits);
  const SplitMasks& s = g.split();
  Evaluation e;
  e.train_ce = masked_ce(logits, g.labels(), s.train);
  e.val_ce = masked_ce(logits, g.labels(), s.val);
  e.train_acc = accuracy(preds, g.labels(), s.train);
  e.val_acc = accuracy(preds, g.labels(), s.val);
  e.test_acc = accuracy(preds, g.labels(), s.test);
  return e;
}

ProbeRecord probe(const TgsParams& params, const SparseRows& inputs, const GraphStore& g, Index epoch) {
  const Matrix h = node_embeddings(params, inputs);
  return {epoch, mean_hop_cosine(h, g, 1), mean_hop_cosine(h, g, 2)};
}

Index count(const Mask& m) {
  Index n = 0;
  for (auto v : m) n += v != 0;
  return n;
}

}  // namespace

SparseRows model_inputs(const GraphStore& g, bool normalize) {
  SparseRows x = SparseRows::from_dense(g.features());
  return normalize ? x.row_normalized() : x;
}

Matrix node_embeddings(const TgsParams& params, const SparseRows& inputs) { return backbone_forward(params, inputs); }

TrainResult train(const GraphStore& g, const TrainConfig& cfg) {
  cfg.validate();
  if (!g.has_split()) throw std::invalid_argument("train: dataset has no train/val/test split");
  const SplitMasks& split = g.split();
  const std::vector<NodeId> train_nodes = mask_nodes(split.train);
  if (train_nodes.empty()) throw std::invalid_argument("train: empty train mask");
  if (count(split.val) == 0) throw std::invalid_argument("train: empty validation mask");
  if (count(split.test) == 0) throw std::invalid_argument("train: empty test mask");
  const bool vanilla = cfg.vanilla_mlp();
  if (!vanilla && g.num_edges() == 0) throw std::invalid_argument("train: graph has no edges");

  const auto start = std::chrono::steady_clock::now();
  Rng root(cfg.seed);
  Rng init_rng = root.fork(1);
  Rng sample_rng = root.fork(2);
  Rng dropout_rng = root.fork(3);

  const SparseRows inputs = model_inputs(g, cfg.normalize_features);
  const ModelShape shape{g.feature_dim(), cfg.hidden, g.num_classes(), cfg.layers};
  TgsParams params = TgsParams::init(shape, init_rng, cfg.bn_momentum, cfg.bn_epsilon);
  TgsParams grads = params.zeros_like();
  AdamState adam = AdamState::for_params(params.trainable());
  const WeightDecay decay = cfg.decoupled_weight_decay ? WeightDecay::Decoupled : WeightDecay::Coupled;

  const NegativeDist negatives =
      cfg.negative_dist == NegativeKind::Degree ? NegativeDist::degree(g) : NegativeDist::uniform(g.num_nodes());
  NegativeOptions neg_opts;
  neg_opts.per_endpoint = cfg.negatives_per_endpoint;
  neg_opts.filter_collisions = cfg.filter_negative_collisions;
  ForwardOptions fwd;
  fwd.dropout = cfg.dropout;
  fwd.mixup = cfg.no_mixup_augment ? MixupMode::Disabled : MixupMode::Learned;
  FeatureLossOptions feat;
  feat.use_negatives = !cfg.no_negatives;
  feat.normalize_positive_term = cfg.normalize_positive_term;

  RunReport report;
  report.method = vanilla ? "mlp" : "tgs";
  report.config = cfg.entries();
  report.seed = cfg.seed;
  report.num_nodes = g.num_nodes();
  report.num_edges = g.num_edges();
  report.num_classes = g.num_classes();
  report.feature_dim = g.feature_dim();
  report.train_nodes = train_nodes.size();
  report.val_nodes = count(split.val);
  report.test_nodes = count(split.test);
  report.probes.push_back(probe(params, inputs, g, 0));

  TgsParams best = params;
  double best_val = -1.0;

  const auto step = [&](const EdgeBatch& batch, std::span<const NodeId> extra, Index epoch, EpochRecord& rec,
                        const TgsParams& epoch_start) {
    ForwardBundle bundle = forward_batch(params, inputs, batch, ForwardMode::Train, fwd, dropout_rng, extra);
    HeadGradients hg = HeadGradients::zeros_for(bundle);
    double lf = 0.0, ll = 0.0;
    if (vanilla) {
      ll = supervised_loss(bundle, g.labels(), split.train, &hg);
    } else {
      lf = feature_loss_batch(bundle, batch, feat, cfg.alpha > 0.0 ? &hg : nullptr, cfg.alpha);
      ll = label_loss_batch(bundle, batch, g.labels(), split.train, !cfg.no_label_sd, &hg);
    }
    const double total = total_loss(lf, ll, cfg.alpha);
    if (!std::isfinite(total)) {
      throw DivergenceError("loss became non-finite in epoch " + std::to_string(epoch), epoch_start, epoch);
    }
    for (auto& ref : grads.trainable()) ref.value->fill(0.0);
    backward_batch(params, bundle, hg, grads);
    adam_step(params.trainable(), std::as_const(grads).trainable(), adam, cfg.lr, cfg.weight_decay, decay);
    rec.loss_total += total;
    rec.loss_feature += lf;
    rec.loss_label += ll;
  };

  for (Index epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const TgsParams epoch_start = params;
    EpochRecord rec;
    rec.epoch = epoch;
    Index steps = 0;
    // any non-finite value caught at a checked boundary ends the run
    try {
      if (vanilla) {
        step(EdgeBatch{}, train_nodes, epoch, rec, epoch_start);
        steps = 1;
      } else {
        for (EdgeBatch& batch : epoch_batches(g, cfg.batch, sample_rng)) {
          if (!cfg.no_negatives) draw_negatives(batch, negatives, sample_rng, neg_opts, &g);
          step(batch, {}, epoch, rec, epoch_start);
          ++steps;
        }
      }
    } catch (const DivergenceError&) {
      throw;
    } catch (const NumericError& e) {
      throw DivergenceError(std::string(e.what()) + " in epoch " + std::to_string(epoch), epoch_start, epoch);
    }
    rec.loss_total /= static_cast<double>(steps);
    rec.loss_feature /= static_cast<double>(steps);
    rec.loss_label /= static_cast<double>(steps);
    if (!params.all_finite()) throw DivergenceError("parameters became non-finite", epoch_start, epoch);

    const Evaluation ev = evaluate(params, inputs, g);
    rec.train_ce = ev.train_ce;
    rec.val_ce = ev.val_ce;
    rec.train_acc = ev.train_acc;
    rec.val_acc = ev.val_acc;
    report.epochs.push_back(rec);
    if (ev.val_acc > best_val) {
      best_val = ev.val_acc;
      best = params;
      report.best_epoch = epoch;
      report.best_val_acc = ev.val_acc;
      report.test_acc = ev.test_acc;
    }
    if (epoch == cfg.epochs) {
      report.final_val_acc = ev.val_acc;
      report.final_test_acc = ev.test_acc;
    }
    if (epoch == cfg.epochs || (cfg.probe_interval > 0 && epoch % cfg.probe_interval == 0)) {
      report.probes.push_back(probe(params, inputs, g, epoch));
    }
    spdlog::debug("epoch {} loss {:.4f} val {:.4f}", epoch, rec.loss_total, ev.val_acc);
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.train_seconds = seconds;
  report.mean_epoch_ms = 1000.0 * seconds / static_cast<double>(cfg.epochs);
  return {std::move(best), std::move(report)};
}

RepeatedReport run_repeated(const GraphStore& g, const TrainConfig& cfg, Index runs) {
  if (runs == 0) throw std::invalid_argument("run_repeated: runs must be >= 1");
  std::vector<RunReport> reports;
  for (Index i = 0; i < runs; ++i) {
    TrainConfig c = cfg;
    c.seed = cfg.seed + i;
    reports.push_back(train(g, c).report);
  }
  return aggregate(std::move(reports));
}

}  // namespace tgs
