#include <gtest/gtest.h>

#include <cmath>

#include "../oracles/oracles.hpp"
#include "../support.hpp"
#include "tgs/bench/synthetic.hpp"
#include "tgs/eval/metrics.hpp"
#include "tgs/eval/suites.hpp"

namespace tgs {
namespace {

TEST(Accuracy, CountsMaskedNodesOnly) {
  const std::vector<Label> pred{0, 1, 2, 1};
  const std::vector<Label> truth{0, 1, 1, 0};
  EXPECT_DOUBLE_EQ(accuracy(pred, truth, Mask{1, 1, 1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(accuracy(pred, truth, Mask{1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(pred, truth, Mask{0, 0, 1, 1}), 0.0);
  EXPECT_THROW(accuracy(pred, truth, Mask{0, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(accuracy(pred, truth, Mask{1, 1}), std::invalid_argument);
}

TEST(HopCosine, MatchesBruteForceOnSmallGraphs) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const Index n = 3 + rng.below(6);
    const GraphStore g = testing::random_graph(n, n - 1 + rng.below(n), 2, 2, rng);
    Matrix emb(n, 3);
    for (double& v : emb.values()) v = rng.normal();
    if (seed % 5 == 0) emb.row(0)[0] = emb.row(0)[1] = emb.row(0)[2] = 0.0;
    for (int hop : {1, 2}) EXPECT_NEAR(mean_hop_cosine(emb, g, hop), oracle::mean_hop_cosine(emb, g, hop), 1e-10) << seed;
  }
}

TEST(HopCosine, PathGraphByHand) {
  const GraphStore g = GraphStore::build(Matrix(3, 1), std::vector<Edge>{{0, 1}, {1, 2}}, {0, 0, 0}, 1);
  const Matrix emb = Matrix::from_rows({{1, 0}, {1, 1}, {0, 1}});
  const double c = 1 / std::sqrt(2.0);
  EXPECT_NEAR(mean_hop_cosine(emb, g, 1), (c + c + c) / 3.0, 1e-12);
  EXPECT_NEAR(mean_hop_cosine(emb, g, 2), 0.0, 1e-12);
  EXPECT_THROW(mean_hop_cosine(emb, g, 3), std::invalid_argument);
}

GraphStore small_citation(std::uint64_t seed) {
  Rng rng(seed);
  CitationSpec spec;
  spec.class_sizes = {50, 50, 50};
  spec.feature_dim = 100;
  spec.edges = 300;
  spec.community_size = 25;
  spec.words_mean = 10;
  spec.val_size = 40;
  spec.test_size = 60;
  spec.train_per_class = 15;
  return citation_like(spec, rng);
}

TrainConfig quick_tgs() {
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.hidden = 16;
  cfg.batch = 64;
  return cfg;
}

TEST(Suites, AblationMatrixHasFiveRows) {
  const GraphStore g = small_citation(1);
  const auto rows = run_ablation_matrix(g, quick_tgs(), 2);
  ASSERT_EQ(rows.size(), 5u);
  const std::vector<std::string> names{"full", "wo_ns", "wo_augment", "wo_lsd", "degree_negatives"};
  for (Index i = 0; i < 5; ++i) {
    EXPECT_EQ(rows[i].method, names[i]);
    EXPECT_EQ(rows[i].accuracies.size(), 2u);
    EXPECT_GE(rows[i].mean_acc, 0.0);
    EXPECT_LE(rows[i].mean_acc, 1.0);
  }
  const std::string csv = suite_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "protocol,setting,method,mean_acc,std_acc,runs,train_labels");
}

TEST(Suites, LimitedLabelsUsesKPerClass) {
  const GraphStore g = small_citation(2);
  SuiteConfig cfg;
  cfg.tgs = quick_tgs();
  cfg.gcn.epochs = 5;
  cfg.runs = 2;
  cfg.label_counts = {5};
  const auto rows = run_robustness_suite(g, cfg, Protocol::LimitedLabels);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.train_labels, 5 * g.num_classes());
    EXPECT_DOUBLE_EQ(r.setting, 5.0);
  }
  EXPECT_EQ(rows[0].method, "tgs");
  EXPECT_EQ(rows[1].method, "mlp");
  EXPECT_EQ(rows[2].method, "gcn");
}

TEST(Suites, LabelNoiseRowsAreDeterministic) {
  const GraphStore g = small_citation(3);
  SuiteConfig cfg;
  cfg.tgs = quick_tgs();
  cfg.runs = 1;
  cfg.include_gcn = false;
  cfg.noise_ratios = {0.0, 0.6};
  const auto a = run_robustness_suite(g, cfg, Protocol::LabelNoise);
  const auto b = run_robustness_suite(g, cfg, Protocol::LabelNoise);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(suite_csv(a), suite_csv(b));
  EXPECT_EQ(a[0].protocol, "label_noise");
}

TEST(Suites, VanillaCounterpart) {
  TrainConfig cfg;
  const TrainConfig mlp = as_vanilla_mlp(cfg);
  EXPECT_TRUE(mlp.vanilla_mlp());
  EXPECT_EQ(mlp.hidden, cfg.hidden);
  EXPECT_EQ(mlp.lr, cfg.lr);
}

}  // namespace
}  // namespace tgs
