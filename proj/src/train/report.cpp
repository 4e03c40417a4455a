#include "tgs/train/report.hpp"

#include <cmath>
#include <json.hpp>
#include <sstream>

namespace tgs {

namespace {

using nlohmann::ordered_json;

ordered_json run_json(const RunReport& r, bool timings) {
  ordered_json j;
  j["method"] = r.method;
  j["seed"] = r.seed;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  j["config"] = cfg;
  j["dataset"] = {{"nodes", r.num_nodes},       {"edges", r.num_edges},         {"classes", r.num_classes},
                  {"features", r.feature_dim},  {"train_nodes", r.train_nodes}, {"val_nodes", r.val_nodes},
                  {"test_nodes", r.test_nodes}};
  j["selection"] = "best_val";
  j["best_epoch"] = r.best_epoch;
  j["best_val_acc"] = r.best_val_acc;
  j["test_acc"] = r.test_acc;
  j["final_val_acc"] = r.final_val_acc;
  j["final_test_acc"] = r.final_test_acc;
  ordered_json epochs = ordered_json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"loss_total", e.loss_total},
                      {"loss_feature", e.loss_feature},
                      {"loss_label", e.loss_label},
                      {"train_ce", e.train_ce},
                      {"val_ce", e.val_ce},
                      {"train_acc", e.train_acc},
                      {"val_acc", e.val_acc}});
  }
  j["epochs"] = epochs;
  ordered_json probes = ordered_json::array();
  for (const auto& p : r.probes) probes.push_back({{"epoch", p.epoch}, {"hop1", p.hop1}, {"hop2", p.hop2}});
  j["probes"] = probes;
  if (timings) j["timings"] = {{"train_seconds", r.train_seconds}, {"mean_epoch_ms", r.mean_epoch_ms}};
  return j;
}

}  // namespace

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

RepeatedReport aggregate(std::vector<RunReport> runs) {
  RepeatedReport r;
  std::vector<double> test, val;
  for (const auto& run : runs) {
    test.push_back(run.test_acc);
    val.push_back(run.best_val_acc);
  }
  std::tie(r.mean_test_acc, r.std_test_acc) = mean_std(test);
  std::tie(r.mean_val_acc, r.std_val_acc) = mean_std(val);
  r.runs = std::move(runs);
  return r;
}

std::string to_json(const RunReport& report, bool include_timings) {
  return run_json(report, include_timings).dump(2);
}

std::string to_json(const RepeatedReport& report, bool include_timings) {
  ordered_json j;
  j["runs_count"] = report.runs.size();
  ordered_json seeds = ordered_json::array();
  for (const auto& r : report.runs) seeds.push_back(r.seed);
  j["seeds"] = seeds;
  j["mean_test_acc"] = report.mean_test_acc;
  j["std_test_acc"] = report.std_test_acc;
  j["mean_val_acc"] = report.mean_val_acc;
  j["std_val_acc"] = report.std_val_acc;
  ordered_json runs = ordered_json::array();
  for (const auto& r : report.runs) runs.push_back(run_json(r, include_timings));
  j["runs"] = runs;
  return j.dump(2);
}

std::string curve_csv(const RunReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,loss_total,loss_feature,loss_label,train_ce,val_ce,train_acc,val_acc\n";
  for (const auto& e : report.epochs) {
    out << e.epoch << ',' << e.loss_total << ',' << e.loss_feature << ',' << e.loss_label << ',' << e.train_ce << ','
        << e.val_ce << ',' << e.train_acc << ',' << e.val_acc << '\n';
  }
  return out.str();
}

}  // namespace tgs
