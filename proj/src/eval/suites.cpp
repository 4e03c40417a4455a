#include "tgs/eval/suites.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "tgs/error.hpp"
#include "tgs/graph/split.hpp"
#include "tgs/train/report.hpp"
#include "tgs/train/trainer.hpp"

namespace tgs {

const char* to_string(Protocol p) { return p == Protocol::LimitedLabels ? "limited_labels" : "label_noise"; }

TrainConfig as_vanilla_mlp(TrainConfig cfg) {
  cfg.alpha = 0.0;
  cfg.no_label_sd = true;
  return cfg;
}

namespace {

Index count_mask(const Mask& m) {
  Index n = 0;
  for (auto b : m) n += b != 0;
  return n;
}

SuiteRow make_row(std::string protocol, double setting, std::string method) {
  SuiteRow row;
  row.protocol = std::move(protocol);
  row.setting = setting;
  row.method = std::move(method);
  return row;
}

void finish(SuiteRow& row) { std::tie(row.mean_acc, row.std_acc) = mean_std(row.accuracies); }

GraphStore perturbed(const GraphStore& g, Protocol protocol, double setting, std::uint64_t seed) {
  if (protocol == Protocol::LimitedLabels) {
    SplitSpec spec;
    spec.mode = SplitMode::PerClass;
    spec.per_class = static_cast<Index>(setting);
    spec.seed = seed;
    return g.with_split(make_split(g, spec));
  }
  return inject_label_noise(g, {setting, seed});
}

}  // namespace

std::vector<SuiteRow> run_robustness_suite(const GraphStore& g, const SuiteConfig& cfg, Protocol protocol) {
  cfg.tgs.validate();
  cfg.gcn.validate();
  if (cfg.runs < 1) throw ConfigError("runs must be >= 1");
  if (!g.has_split()) throw ConfigError("robustness suite needs a dataset split");
  std::vector<double> settings;
  if (protocol == Protocol::LimitedLabels) {
    for (Index k : cfg.label_counts) settings.push_back(static_cast<double>(k));
  } else {
    for (double r : cfg.noise_ratios) {
      if (r < 0.0 || r >= 1.0) throw ConfigError("noise ratios must lie in [0, 1)");
      settings.push_back(r);
    }
  }

  std::vector<SuiteRow> rows;
  for (double setting : settings) {
    SuiteRow tgs = make_row(to_string(protocol), setting, "tgs");
    SuiteRow mlp = make_row(to_string(protocol), setting, "mlp");
    SuiteRow gcn = make_row(to_string(protocol), setting, "gcn");
    for (Index i = 0; i < cfg.runs; ++i) {
      const std::uint64_t seed = cfg.tgs.seed + i;
      const GraphStore h = perturbed(g, protocol, setting, seed);
      if (i == 0) tgs.train_labels = mlp.train_labels = gcn.train_labels = count_mask(h.split().train);
      TrainConfig tc = cfg.tgs;
      tc.seed = seed;
      tgs.accuracies.push_back(train(h, tc).report.test_acc);
      if (cfg.include_mlp) mlp.accuracies.push_back(train(h, as_vanilla_mlp(tc)).report.test_acc);
      if (cfg.include_gcn) {
        GcnConfig gc = cfg.gcn;
        gc.seed = seed;
        gcn.accuracies.push_back(gcn_train(h, gc).report.test_acc);
      }
      spdlog::info("{} {} run {}: tgs {:.4f}", to_string(protocol), setting, i, tgs.accuracies.back());
    }
    finish(tgs);
    rows.push_back(std::move(tgs));
    if (cfg.include_mlp) {
      finish(mlp);
      rows.push_back(std::move(mlp));
    }
    if (cfg.include_gcn) {
      finish(gcn);
      rows.push_back(std::move(gcn));
    }
  }
  return rows;
}

std::vector<SuiteRow> run_ablation_matrix(const GraphStore& g, const TrainConfig& base, Index runs) {
  base.validate();
  if (runs < 1) throw ConfigError("runs must be >= 1");
  std::vector<std::pair<std::string, TrainConfig>> variants;
  variants.emplace_back("full", base);
  variants.emplace_back("wo_ns", base);
  variants.back().second.no_negatives = true;
  variants.emplace_back("wo_augment", base);
  variants.back().second.no_mixup_augment = true;
  variants.emplace_back("wo_lsd", base);
  variants.back().second.no_label_sd = true;
  variants.emplace_back("degree_negatives", base);
  variants.back().second.negative_dist = NegativeKind::Degree;

  std::vector<SuiteRow> rows;
  const Index labeled = g.has_split() ? count_mask(g.split().train) : 0;
  for (auto& [name, cfg] : variants) {
    SuiteRow row = make_row("ablation", 0.0, name);
    row.train_labels = labeled;
    for (Index i = 0; i < runs; ++i) {
      TrainConfig c = cfg;
      c.seed = base.seed + i;
      row.accuracies.push_back(train(g, c).report.test_acc);
      spdlog::info("ablation {} run {}: {:.4f}", name, i, row.accuracies.back());
    }
    finish(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string suite_csv(const std::vector<SuiteRow>& rows) {
  std::string out = "protocol,setting,method,mean_acc,std_acc,runs,train_labels\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.protocol, r.setting, r.method, r.mean_acc, r.std_acc,
                       r.accuracies.size(), r.train_labels);
  }
  return out;
}

std::string suite_table(const std::vector<SuiteRow>& rows) {
  std::string out = fmt::format("{:<15} {:>7} {:<17} {:>16} {:>5} {:>7}\n", "protocol", "setting", "method",
                                "accuracy (%)", "runs", "labels");
  for (const auto& r : rows) {
    out += fmt::format("{:<15} {:>7} {:<17} {:>8.2f} ± {:<5.2f} {:>5} {:>7}\n", r.protocol, r.setting, r.method,
                       100.0 * r.mean_acc, 100.0 * r.std_acc, r.accuracies.size(), r.train_labels);
  }
  return out;
}

}  // namespace tgs
