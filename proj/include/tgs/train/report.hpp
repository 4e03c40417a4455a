#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgs/train/config.hpp"

namespace tgs {

struct EpochRecord {
  Index epoch = 0;  // 1-based
  double loss_total = 0.0;    // means over the epoch's optimizer steps
  double loss_feature = 0.0;
  double loss_label = 0.0;
  double train_ce = 0.0;  // eval-mode CE of f on train nodes
  double val_ce = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
};

/// Mean cosine similarity of backbone embeddings to 1-hop and exact 2-hop
/// neighbors; epoch 0 is the initialization.
struct ProbeRecord {
  Index epoch = 0;
  double hop1 = 0.0;
  double hop2 = 0.0;
};

struct RunReport {
  std::string method;     // "tgs", "mlp" or "gcn"
  ConfigEntries config;   // effective configuration
  std::uint64_t seed = 0;
  Index num_nodes = 0;
  Index num_edges = 0;
  Index num_classes = 0;
  Index feature_dim = 0;
  Index train_nodes = 0;
  Index val_nodes = 0;
  Index test_nodes = 0;

  std::vector<EpochRecord> epochs;
  std::vector<ProbeRecord> probes;
  /// Selected parameters: best validation accuracy (strict improvement).
  Index best_epoch = 0;
  double best_val_acc = 0.0;
  double test_acc = 0.0;  // of the selected parameters
  double final_val_acc = 0.0;
  double final_test_acc = 0.0;

  // wall-clock; excluded from the deterministic serialization
  double train_seconds = 0.0;
  double mean_epoch_ms = 0.0;
};

struct RepeatedReport {
  std::vector<RunReport> runs;
  double mean_test_acc = 0.0;
  double std_test_acc = 0.0;  // population standard deviation
  double mean_val_acc = 0.0;
  double std_val_acc = 0.0;
};

/// Mean and population standard deviation; {0, 0} for an empty input.
std::pair<double, double> mean_std(const std::vector<double>& values);
RepeatedReport aggregate(std::vector<RunReport> runs);

/// JSON text. Schema: see docs/report_schema.md. Timings are emitted only when
/// `include_timings` is set, so two runs can be compared byte for byte.
std::string to_json(const RunReport& report, bool include_timings = true);
std::string to_json(const RepeatedReport& report, bool include_timings = true);
/// Per-epoch learning curve as CSV (epoch,loss_total,...,val_acc).
std::string curve_csv(const RunReport& report);

}  // namespace tgs
