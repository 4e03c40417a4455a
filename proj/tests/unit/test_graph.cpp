#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "../support.hpp"
#include "tgs/graph/dataset.hpp"
#include "tgs/graph/graph_store.hpp"
#include "tgs/graph/split.hpp"

namespace fs = std::filesystem;

namespace tgs {
namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("tgs_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
  }

 private:
  fs::path path_;
};

void write_toy(const TempDir& d, const std::string& edges, const std::string& labels = "0\n1\n",
               const std::string& header = "nodes 2\nfeatures 2\nclasses 2\n") {
  d.write("header.txt", header);
  d.write("features.csv", "1,0\n0,1\n");
  d.write("edges.txt", edges);
  d.write("labels.txt", labels);
}

DatasetErrorKind load_error(const fs::path& dir) {
  try {
    load_dataset(dir);
  } catch (const DatasetError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "load succeeded";
  return DatasetErrorKind::MissingFile;
}

TEST(GraphStore, TwoNodeToyCsr) {
  TempDir d;
  write_toy(d, "0 1\n");
  const GraphStore g = load_dataset(d.path());
  EXPECT_EQ(std::vector<std::size_t>(g.row_offsets().begin(), g.row_offsets().end()),
            (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(std::vector<NodeId>(g.columns().begin(), g.columns().end()), (std::vector<NodeId>{1, 0}));
  EXPECT_EQ(g.neighbors(0).size(), 1u);
  EXPECT_EQ(g.neighbors(0)[0], 1u);
}

TEST(GraphStore, SelfLoopsAndDuplicatesDropped) {
  TempDir d;
  write_toy(d, "0 1\n1 0\n0 1\n1 1\n");
  BuildStats stats;
  const GraphStore g = load_dataset(d.path(), &stats);
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(stats.self_loops_dropped, 1u);
  EXPECT_EQ(stats.duplicates_dropped, 2u);
}

TEST(GraphStore, EachLoadErrorIsDistinct) {
  {
    TempDir d;
    write_toy(d, "0 1\n", "0\n1\n", "nodes 2\nfeatures two\nclasses 2\n");
    EXPECT_EQ(load_error(d.path()), DatasetErrorKind::MalformedHeader);
  }
  {
    TempDir d;
    write_toy(d, "0 1\n", "0\n5\n");
    EXPECT_EQ(load_error(d.path()), DatasetErrorKind::LabelOutOfRange);
  }
  {
    TempDir d;
    write_toy(d, "0 1\n", "0\n1\n", "nodes 3\nfeatures 2\nclasses 2\n");
    EXPECT_EQ(load_error(d.path()), DatasetErrorKind::FeatureRowMismatch);
  }
  {
    TempDir d;
    write_toy(d, "0 7\n");
    EXPECT_EQ(load_error(d.path()), DatasetErrorKind::DanglingEdge);
  }
  {
    TempDir d;
    write_toy(d, "0 1\n");
    d.write("train.txt", "0\n");
    EXPECT_EQ(load_error(d.path()), DatasetErrorKind::InvalidSplit);
  }
  EXPECT_EQ(load_error("/nonexistent/tgs/dataset"), DatasetErrorKind::MissingFile);
}

TEST(GraphStore, NeighborsOfIsolatedNodeIsEmptyAndOutOfRangeThrows) {
  const Matrix x(3, 1);
  const std::vector<Edge> edges{{0, 1}};
  const GraphStore g = GraphStore::build(x, edges, {0, 0, 1}, 2);
  EXPECT_TRUE(g.neighbors(2).empty());
  EXPECT_THROW(g.neighbors(3), std::out_of_range);
}

TEST(GraphStore, RandomGraphIsSymmetric) {
  Rng rng(1);
  const GraphStore g = testing::random_graph(60, 200, 3, 4, rng);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto n = g.neighbors(v);
    EXPECT_TRUE(std::is_sorted(n.begin(), n.end()));
    for (NodeId u : n) {
      EXPECT_NE(u, v);
      EXPECT_TRUE(g.has_edge(u, v));
    }
  }
}

TEST(GraphStore, RoundTripsThroughBothFeatureFormats) {
  Rng rng(2);
  const GraphStore g = testing::random_graph(20, 40, 5, 3, rng);
  for (FeatureFormat f : {FeatureFormat::Binary, FeatureFormat::Csv}) {
    TempDir d;
    save_dataset(g, d.path(), f);
    const GraphStore h = load_dataset(d.path());
    EXPECT_EQ(h.features(), g.features());
    EXPECT_EQ(h.edge_list().size(), g.edge_list().size());
    EXPECT_TRUE(std::equal(h.labels().begin(), h.labels().end(), g.labels().begin()));
    EXPECT_EQ(h.split().train, g.split().train);
    EXPECT_EQ(h.split().test, g.split().test);
  }
}

// independent scan of the files: count lines and distinct undirected pairs
TEST(GraphStore, CountsMatchIndependentFileScan) {
  Rng rng(3);
  const GraphStore g = testing::random_graph(30, 70, 2, 3, rng);
  TempDir d;
  save_dataset(g, d.path());
  d.write("edges.txt", [&] {
    std::ostringstream s;
    for (const Edge& e : g.edge_list()) s << e.v << ' ' << e.u << '\n' << e.u << ' ' << e.v << '\n';
    return s.str();
  }());
  std::ifstream edges(d.path() / "edges.txt");
  std::set<std::pair<int, int>> pairs;
  for (int u, v; edges >> u >> v;) pairs.insert({std::min(u, v), std::max(u, v)});
  std::ifstream labels(d.path() / "labels.txt");
  int lines = 0;
  for (std::string l; std::getline(labels, l);) lines += !l.empty();
  const GraphStore h = load_dataset(d.path());
  EXPECT_EQ(h.num_edges(), pairs.size());
  EXPECT_EQ(h.num_nodes(), static_cast<Index>(lines));
}

TEST(GraphStore, DegreeDistribution) {
  const std::vector<Edge> star{{0, 1}, {0, 2}, {0, 3}};
  const GraphStore g = GraphStore::build(Matrix(4, 1), star, {0, 0, 0, 0}, 1);
  const auto p = degree_distribution(g);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  for (int i = 1; i < 4; ++i) EXPECT_DOUBLE_EQ(p[i], 1.0 / 6.0);
  EXPECT_THROW(degree_distribution(GraphStore::build(Matrix(2, 1), {}, {0, 0}, 1)), std::invalid_argument);

  Rng rng(4);
  const auto q = degree_distribution(testing::random_graph(50, 150, 1, 2, rng));
  EXPECT_NEAR(std::accumulate(q.begin(), q.end(), 0.0), 1.0, 1e-12);
}

GraphStore labeled_graph(Index per_class, Index classes) {
  const Index n = per_class * classes;
  std::vector<Label> labels(n);
  for (Index i = 0; i < n; ++i) labels[i] = static_cast<Label>(i % classes);
  return GraphStore::build(Matrix(n, 1), {}, labels, classes);
}

TEST(Split, PerClassSelectsExactlyK) {
  const GraphStore g = labeled_graph(300, 7);
  SplitSpec spec;
  spec.mode = SplitMode::PerClass;
  spec.per_class = 20;
  const SplitMasks m = make_split(g, spec);
  std::map<Label, int> per_class;
  Index train = 0, val = 0, test = 0;
  for (Index i = 0; i < g.num_nodes(); ++i) {
    if (m.train[i]) ++per_class[g.labels()[i]], ++train;
    val += m.val[i];
    test += m.test[i];
    EXPECT_LE(m.train[i] + m.val[i] + m.test[i], 1);
  }
  EXPECT_EQ(train, 140u);
  for (auto [c, k] : per_class) EXPECT_EQ(k, 20);
  EXPECT_EQ(val, 500u);
  EXPECT_EQ(test, 1000u);
}

TEST(Split, FiveLabelsPerClassFromStoredTrainingSet) {
  Rng rng(5);
  const GraphStore g = testing::random_graph(200, 400, 2, 3, rng);
  SplitSpec spec;
  spec.mode = SplitMode::PerClass;
  spec.per_class = 5;
  const SplitMasks m = make_split(g, spec);
  Index train = 0;
  for (Index i = 0; i < g.num_nodes(); ++i) {
    train += m.train[i];
    if (m.train[i]) {
      EXPECT_TRUE(g.split().train[i]);
    }
  }
  EXPECT_EQ(train, 15u);
  EXPECT_EQ(m.val, g.split().val);
  EXPECT_EQ(m.test, g.split().test);
}

TEST(Split, DeterministicAndNamesShortClass) {
  const GraphStore g = labeled_graph(30, 3);
  SplitSpec spec;
  spec.mode = SplitMode::PerClass;
  spec.per_class = 10;
  spec.val_size = 10;
  spec.test_size = 10;
  spec.seed = 9;
  EXPECT_EQ(make_split(g, spec).train, make_split(g, spec).train);
  spec.per_class = 31;
  try {
    make_split(g, spec);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("class 0"), std::string::npos) << e.what();
  }
}

TEST(Noise, ZeroRatioLeavesLabels) {
  Rng rng(6);
  const GraphStore g = testing::random_graph(50, 80, 2, 4, rng);
  const GraphStore h = inject_label_noise(g, {0.0, 1});
  EXPECT_TRUE(std::equal(g.labels().begin(), g.labels().end(), h.labels().begin()));
}

TEST(Noise, FlipsTrainLabelsAtTheRequestedRate) {
  const Index n = 10000;
  std::vector<Label> labels(n);
  for (Index i = 0; i < n; ++i) labels[i] = static_cast<Label>(i % 5);
  SplitMasks split{Mask(n, 1), Mask(n, 0), Mask(n, 0)};
  for (Index i = 0; i < 200; ++i) {
    split.train[i] = 0;
    split.val[i] = 1;
  }
  const GraphStore g = GraphStore::build(Matrix(n, 1), {}, labels, 5, split);
  const GraphStore h = inject_label_noise(g, {0.6, 3});
  Index flipped = 0, train = 0;
  for (Index i = 0; i < n; ++i) {
    if (!split.train[i]) {
      EXPECT_EQ(h.labels()[i], g.labels()[i]);
      continue;
    }
    ++train;
    flipped += h.labels()[i] != g.labels()[i];
  }
  EXPECT_NEAR(static_cast<double>(flipped) / static_cast<double>(train), 0.6, 0.02);
  const GraphStore again = inject_label_noise(g, {0.6, 3});
  EXPECT_TRUE(std::equal(h.labels().begin(), h.labels().end(), again.labels().begin()));
}

}  // namespace
}  // namespace tgs
