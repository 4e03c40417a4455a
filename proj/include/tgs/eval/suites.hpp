#pragma once

#include <string>
#include <vector>

#include "tgs/gcn/gcn.hpp"
#include "tgs/graph/graph_store.hpp"
#include "tgs/train/config.hpp"

namespace tgs {

enum class Protocol { LimitedLabels, LabelNoise };

const char* to_string(Protocol p);

struct SuiteConfig {
  TrainConfig tgs;
  GcnConfig gcn;
  /// Seeds per setting: tgs.seed, tgs.seed + 1, ...
  Index runs = 5;
  bool include_mlp = true;
  bool include_gcn = true;
  std::vector<Index> label_counts{5, 10, 15};
  std::vector<double> noise_ratios{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
};

struct SuiteRow {
  std::string protocol;  // "limited_labels", "label_noise" or an ablation name
  double setting = 0.0;  // k per class or noise ratio r
  std::string method;    // "tgs", "mlp", "gcn" or the ablation variant
  double mean_acc = 0.0;
  double std_acc = 0.0;  // population
  std::vector<double> accuracies;
  Index train_labels = 0;  // labeled nodes of the first run
};

/// The vanilla MLP counterpart of a TGS configuration: same optimizer and
/// backbone, α = 0 and no label self-distillation.
TrainConfig as_vanilla_mlp(TrainConfig cfg);

/// Test accuracy per setting of the protocol, over cfg.runs seeds. Limited
/// labels keeps k per class from the stored training set; label noise flips
/// training labels only. Seed i drives the split or noise draw and the model.
std::vector<SuiteRow> run_robustness_suite(const GraphStore& g, const SuiteConfig& cfg, Protocol protocol);

/// full, w/o NS, w/o augment, w/o LSD and degree-prior negatives, each over
/// `runs` seeds starting at base.seed.
std::vector<SuiteRow> run_ablation_matrix(const GraphStore& g, const TrainConfig& base, Index runs);

/// `protocol,setting,method,mean_acc,std_acc,runs,train_labels`
std::string suite_csv(const std::vector<SuiteRow>& rows);
std::string suite_table(const std::vector<SuiteRow>& rows);

}  // namespace tgs
