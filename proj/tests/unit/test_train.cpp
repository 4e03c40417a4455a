#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "../support.hpp"
#include "tgs/error.hpp"
#include "tgs/gcn/gcn.hpp"
#include "tgs/model/checkpoint.hpp"
#include "tgs/model/model.hpp"
#include "tgs/train/adam.hpp"
#include "tgs/train/config.hpp"
#include "tgs/train/report.hpp"
#include "tgs/train/trainer.hpp"

namespace fs = std::filesystem;

namespace tgs {
namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("tgs_" + std::to_string(::getpid()) + "_" + name);
}

GraphStore small_graph(std::uint64_t seed = 1) {
  Rng rng(seed);
  return testing::random_graph(40, 90, 8, 3, rng);
}

TrainConfig quick_config() {
  TrainConfig c;
  c.epochs = 4;
  c.hidden = 8;
  c.batch = 32;
  return c;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Rng rng(1);
  TgsParams p = TgsParams::init({7, 5, 3, 3}, rng);
  for (auto& bn : p.norms)
    for (double& v : bn.running_var.values()) v = rng.uniform(0.1, 3.0);
  const fs::path path = temp_file("ckpt");
  write_checkpoint(to_checkpoint(p), path);
  const Checkpoint back = read_checkpoint(path);
  EXPECT_EQ(back, to_checkpoint(p));
  const TgsParams q = tgs_params_from(back);
  EXPECT_EQ(q.shape, p.shape);
  const auto a = p.trainable();
  const auto b = q.trainable();
  for (Index i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i].value, *b[i].value) << a[i].name;
  for (Index l = 0; l < p.norms.size(); ++l) {
    EXPECT_EQ(p.norms[l].running_var, q.norms[l].running_var);
    EXPECT_EQ(p.norms[l].momentum, q.norms[l].momentum);
    EXPECT_EQ(p.norms[l].epsilon, q.norms[l].epsilon);
  }
  fs::remove(path);
}

TEST(Checkpoint, GcnRoundTripAndKindCheck) {
  Rng rng(2);
  const GcnParams p = GcnParams::init(6, 4, 3, 2, rng);
  const fs::path path = temp_file("gcn_ckpt");
  write_checkpoint(to_checkpoint(p), path);
  const Checkpoint c = read_checkpoint(path);
  const GcnParams q = gcn_params_from(c);
  ASSERT_EQ(q.num_layers(), 2u);
  EXPECT_EQ(q.weights[0], p.weights[0]);
  EXPECT_EQ(q.biases[1], p.biases[1]);
  EXPECT_THROW(tgs_params_from(c), CheckpointError);
  fs::remove(path);
}

TEST(Checkpoint, CorruptFilesAreRejected) {
  Rng rng(3);
  const fs::path path = temp_file("bad_ckpt");
  write_checkpoint(to_checkpoint(TgsParams::init({3, 2, 2, 1}, rng)), path);
  fs::resize_file(path, fs::file_size(path) - 5);
  EXPECT_THROW(read_checkpoint(path), CheckpointError);
  std::ofstream(path, std::ios::binary) << "NOTACKPT";
  EXPECT_THROW(read_checkpoint(path), CheckpointError);
  fs::remove(path);
  EXPECT_THROW(read_checkpoint(path), CheckpointError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Matrix theta = Matrix::from_rows({{1.0, -2.0}});
  const Matrix grad = Matrix::from_rows({{0.5, -4.0}});
  std::vector<ParamRef> params{{"w", &theta}};
  std::vector<ConstParamRef> grads{{"w", &grad}};
  AdamState s = AdamState::for_params(params);
  adam_step(params, grads, s, 0.1, 0.0);
  EXPECT_NEAR(theta(0, 0), 0.9, 1e-7);
  EXPECT_NEAR(theta(0, 1), -1.9, 1e-7);
  EXPECT_EQ(s.step, 1);
}

TEST(Adam, CoupledAndDecoupledWeightDecay) {
  const Matrix grad = Matrix::from_rows({{0.0}});
  Matrix a = Matrix::from_rows({{2.0}});
  Matrix b = Matrix::from_rows({{2.0}});
  std::vector<ParamRef> pa{{"w", &a}}, pb{{"w", &b}};
  std::vector<ConstParamRef> g{{"w", &grad}};
  AdamState sa = AdamState::for_params(pa), sb = AdamState::for_params(pb);
  adam_step(pa, g, sa, 0.1, 0.5, WeightDecay::Coupled);
  adam_step(pb, g, sb, 0.1, 0.5, WeightDecay::Decoupled);
  // coupled: effective gradient λθ = 1 → unit Adam step
  EXPECT_NEAR(a(0, 0), 1.9, 1e-7);
  // decoupled: θ(1 − lr·λ), zero gradient step
  EXPECT_DOUBLE_EQ(b(0, 0), 2.0 * (1.0 - 0.05));
}

TEST(Adam, MatchesReferenceOverSeveralSteps) {
  Matrix theta = Matrix::from_rows({{0.3}});
  Matrix grad(1, 1);
  std::vector<ParamRef> params{{"w", &theta}};
  std::vector<ConstParamRef> grads{{"w", &grad}};
  AdamState s = AdamState::for_params(params);
  double ref = 0.3, m = 0.0, v = 0.0;
  for (int t = 1; t <= 5; ++t) {
    grad(0, 0) = 2.0 * theta(0, 0) - 1.0;
    const double gr = 2.0 * ref - 1.0;
    adam_step(params, grads, s, 0.05, 0.0);
    m = 0.9 * m + 0.1 * gr;
    v = 0.999 * v + 0.001 * gr * gr;
    ref -= 0.05 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
    EXPECT_NEAR(theta(0, 0), ref, 1e-14);
  }
}

TEST(Adam, NonFiniteGradientThrowsWithoutUpdating) {
  Matrix theta = Matrix::from_rows({{1.0}});
  Matrix other = Matrix::from_rows({{1.0}});
  const Matrix good = Matrix::from_rows({{1.0}});
  const Matrix bad = Matrix::from_rows({{INFINITY}});
  std::vector<ParamRef> params{{"first", &other}, {"second", &theta}};
  std::vector<ConstParamRef> grads{{"first", &good}, {"second", &bad}};
  AdamState s = AdamState::for_params(params);
  try {
    adam_step(params, grads, s, 0.1, 0.0);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("second"), std::string::npos);
  }
  EXPECT_EQ(other(0, 0), 1.0);
  EXPECT_EQ(s.step, 0);
}

TEST(Config, ParsesCommentsAndRejectsRepeats) {
  const auto kv = parse_key_values("# comment\nlr = 0.05\n\nalpha=0  # trailing\n");
  EXPECT_EQ(kv.at("lr"), "0.05");
  EXPECT_EQ(kv.at("alpha"), "0");
  EXPECT_THROW(parse_key_values("lr = 1\nlr = 2\n"), ConfigError);
  EXPECT_THROW(parse_key_values("just words\n"), ConfigError);
}

TEST(Config, SetValidateAndEntriesRoundTrip) {
  TrainConfig c;
  EXPECT_TRUE(c.set("alpha", "0"));
  EXPECT_EQ(c.alpha, 0.0);
  EXPECT_FALSE(c.set("no_such_key", "1"));
  EXPECT_THROW(c.set("epochs", "many"), ConfigError);
  EXPECT_TRUE(c.set("negative_dist", "degree"));
  EXPECT_TRUE(c.set("no_label_sd", "true"));
  EXPECT_TRUE(c.vanilla_mlp());

  TrainConfig d;
  for (const auto& [k, v] : c.entries()) ASSERT_TRUE(d.set(k, v)) << k;
  EXPECT_EQ(d.entries(), c.entries());

  TrainConfig bad;
  bad.alpha = -1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = TrainConfig{};
  bad.lr = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = TrainConfig{};
  bad.epochs = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Report, MeanStdIsPopulation) {
  const auto [m, s] = mean_std({1.0, 3.0});
  EXPECT_DOUBLE_EQ(m, 2.0);
  EXPECT_DOUBLE_EQ(s, 1.0);
  EXPECT_EQ(mean_std({0.7}).second, 0.0);
}

TEST(Trainer, SameSeedGivesIdenticalReport) {
  const GraphStore g = small_graph();
  const TrainConfig c = quick_config();
  const TrainResult a = train(g, c);
  const TrainResult b = train(g, c);
  EXPECT_EQ(to_json(a.report, false), to_json(b.report, false));
  EXPECT_EQ(a.params.head_f, b.params.head_f);
  TrainConfig other = c;
  other.seed = 1;
  EXPECT_NE(to_json(train(g, other).report, false), to_json(a.report, false));
}

TEST(Trainer, ReportRecordsConfigAndSelection) {
  const GraphStore g = small_graph();
  TrainConfig c = quick_config();
  c.alpha = 0.0;
  c.probe_interval = 2;
  const RunReport r = train(g, c).report;
  EXPECT_EQ(r.epochs.size(), 4u);
  EXPECT_GE(r.best_val_acc, r.final_val_acc);
  bool found = false;
  for (const auto& [k, v] : r.config) found |= k == "alpha" && v == "0";
  EXPECT_TRUE(found);
  ASSERT_GE(r.probes.size(), 2u);
  EXPECT_EQ(r.probes.front().epoch, 0u);
  EXPECT_EQ(r.probes.back().epoch, 4u);
  const std::string csv = curve_csv(r);
  EXPECT_NE(csv.find("train_ce"), std::string::npos);
  EXPECT_NE(csv.find("val_ce"), std::string::npos);
}

TEST(Trainer, SelectedParametersReproduceReportedAccuracy) {
  const GraphStore g = small_graph(2);
  const TrainResult r = train(g, quick_config());
  const auto preds = infer(r.params, model_inputs(g, true)).labels;
  Index correct = 0, total = 0;
  for (Index i = 0; i < g.num_nodes(); ++i) {
    if (!g.split().test[i]) continue;
    ++total;
    correct += preds[i] == g.labels()[i];
  }
  EXPECT_EQ(r.report.test_acc, static_cast<double>(correct) / static_cast<double>(total));
}

TEST(Trainer, VanillaModeIsPlainMlp) {
  const GraphStore g = small_graph(3);
  TrainConfig c = quick_config();
  c.alpha = 0.0;
  c.no_label_sd = true;
  const RunReport r = train(g, c).report;
  EXPECT_EQ(r.method, "mlp");
  for (const auto& e : r.epochs) {
    EXPECT_EQ(e.loss_feature, 0.0);
    EXPECT_EQ(e.loss_total, e.loss_label);
  }
}

TEST(Trainer, AblationFlagsRun) {
  const GraphStore g = small_graph(4);
  for (int variant = 0; variant < 4; ++variant) {
    TrainConfig c = quick_config();
    c.epochs = 2;
    if (variant == 0) c.no_negatives = true;
    if (variant == 1) c.no_mixup_augment = true;
    if (variant == 2) c.no_label_sd = true;
    if (variant == 3) c.negative_dist = NegativeKind::Degree;
    const RunReport r = train(g, c).report;
    EXPECT_EQ(r.epochs.size(), 2u);
    EXPECT_TRUE(std::isfinite(r.epochs.back().loss_total));
  }
}

TEST(Trainer, DivergenceIsReported) {
  const GraphStore g = small_graph(5);
  TrainConfig c = quick_config();
  c.lr = 1e200;
  c.weight_decay = 0.0;
  EXPECT_THROW(train(g, c), DivergenceError);
}

TEST(Trainer, RepeatedRunsAggregate) {
  const GraphStore g = small_graph(6);
  TrainConfig c = quick_config();
  c.epochs = 2;
  const RepeatedReport one = run_repeated(g, c, 1);
  EXPECT_EQ(one.std_test_acc, 0.0);
  const RepeatedReport two = run_repeated(g, c, 2);
  ASSERT_EQ(two.runs.size(), 2u);
  EXPECT_EQ(two.runs[1].seed, c.seed + 1);
  EXPECT_DOUBLE_EQ(two.mean_test_acc, (two.runs[0].test_acc + two.runs[1].test_acc) / 2.0);
  EXPECT_THROW(run_repeated(g, c, 0), std::invalid_argument);
}

TEST(Trainer, RejectsGraphWithoutTrainNodes) {
  Rng rng(7);
  GraphStore g = testing::random_graph(10, 15, 2, 2, rng);
  SplitMasks empty{Mask(10, 0), Mask(10, 0), Mask(10, 1)};
  EXPECT_THROW(train(g.with_split(empty), quick_config()), std::invalid_argument);
}

}  // namespace
}  // namespace tgs
