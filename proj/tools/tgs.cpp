// tgs: command-line driver for training, evaluation, suites and benchmarks.
//
// Exit codes: 0 ok, 1 configuration error, 2 dataset error, 3 divergence,
// 4 missing or unreadable checkpoint, 5 any other failure.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tgs/bench/bench.hpp"
#include "tgs/bench/synthetic.hpp"
#include "tgs/error.hpp"
#include "tgs/eval/metrics.hpp"
#include "tgs/eval/suites.hpp"
#include "tgs/gcn/gcn.hpp"
#include "tgs/graph/dataset.hpp"
#include "tgs/model/checkpoint.hpp"
#include "tgs/model/model.hpp"
#include "tgs/runtime.hpp"
#include "tgs/train/report.hpp"
#include "tgs/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace tgs;

namespace {

constexpr const char* kDataRootEnv = "TGS_DATA_ROOT";

struct Options {
  std::string config_path;
  std::string dataset;
  std::string out = "tgs_out";
  std::string checkpoint;
  std::string gcn_checkpoint;
  std::optional<std::uint64_t> seed;
  bool random_params = false;
  std::string protocol = "both";
  std::string kind = "standin";
  std::vector<std::string> extras;
};

/// Defaults < config file < `--key value` overrides < --seed.
std::vector<std::pair<std::string, std::string>> collect_entries(const Options& opt) {
  std::map<std::string, std::string> merged;
  if (!opt.config_path.empty()) merged = read_key_value_file(opt.config_path);
  for (std::size_t i = 0; i < opt.extras.size(); ++i) {
    std::string key = opt.extras[i];
    if (key.rfind("--", 0) != 0) throw ConfigError("expected --key, got '" + key + "'");
    key = key.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= opt.extras.size()) throw ConfigError("override --" + key + " has no value");
      value = opt.extras[++i];
    }
    std::replace(key.begin(), key.end(), '-', '_');
    merged[key] = value;
  }
  if (opt.seed) merged["seed"] = std::to_string(*opt.seed);
  return {merged.begin(), merged.end()};
}

template <typename... Setters>
void apply_entries(const std::vector<std::pair<std::string, std::string>>& entries, Setters&&... setters) {
  for (const auto& [key, value] : entries) {
    bool used = false;
    ((used = setters(key, value) || used), ...);
    if (!used) throw ConfigError("unknown config key '" + key + "'");
  }
}

GraphStore resolve_dataset(const std::string& name, const BenchConfig* bench = nullptr, BuildStats* stats = nullptr) {
  if (name.empty()) {
    if (bench != nullptr) {
      Rng rng(bench->seed);
      return gen_synthetic(bench->synthetic, rng);
    }
    throw ConfigError("no dataset given (use --dataset DIR, or 'standin')");
  }
  if (name == "standin") {
    return cora_standin();
  }
  fs::path dir(name);
  if (!fs::exists(dir) && dir.is_relative()) {
    if (const char* root = std::getenv(kDataRootEnv)) dir = fs::path(root) / name;
  }
  if (!fs::is_directory(dir)) throw DatasetError(DatasetErrorKind::MissingFile, "dataset directory not found: " + dir.string());
  return load_dataset(dir, stats);
}

void print_config(const std::string& command, const ConfigEntries& entries, const Options& opt) {
  std::cout << "# effective config (" << command << ")\n";
  if (!opt.dataset.empty()) std::cout << "dataset = " << opt.dataset << "\n";
  std::cout << render_entries(entries) << std::flush;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Index count_mask(const Mask& m) {
  Index n = 0;
  for (auto b : m) n += b != 0;
  return n;
}

Checkpoint load_checkpoint_or_fail(const std::string& path) {
  if (path.empty()) throw CheckpointError("no checkpoint given (use --checkpoint PATH)");
  if (!fs::exists(path)) throw CheckpointError("checkpoint not found: " + path);
  return read_checkpoint(path);
}

int cmd_validate(const Options& opt) {
  const auto entries = collect_entries(opt);
  if (!entries.empty()) throw ConfigError("validate takes no config keys");
  BuildStats stats;
  GraphStore g = resolve_dataset(opt.dataset, nullptr, &stats);
  std::cout << "nodes       " << g.num_nodes() << "\n"
            << "edges       " << g.num_edges() << "\n"
            << "features    " << g.feature_dim() << "\n"
            << "classes     " << g.num_classes() << "\n";
  Index isolated = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) isolated += g.degree(v) == 0;
  std::cout << "isolated    " << isolated << "\n"
            << "dropped     " << stats.self_loops_dropped << " self-loops, " << stats.duplicates_dropped
            << " duplicate edges\n";
  if (g.num_edges() > 0) std::cout << "homophily   " << fmt::format("{:.4f}", edge_homophily(g)) << "\n";
  if (g.has_split()) {
    std::cout << "split       train " << count_mask(g.split().train) << ", val " << count_mask(g.split().val)
              << ", test " << count_mask(g.split().test) << "\n";
  } else {
    std::cout << "split       none\n";
  }
  return 0;
}

int cmd_train(const Options& opt) {
  TrainConfig cfg;
  apply_entries(collect_entries(opt), [&](auto& k, auto& v) { return cfg.set(k, v); });
  cfg.validate();
  print_config("train", cfg.entries(), opt);
  GraphStore g = resolve_dataset(opt.dataset);
  const fs::path out(opt.out);
  fs::create_directories(out);
  TrainResult r = train(g, cfg);

  Checkpoint ckpt = to_checkpoint(r.params);
  ckpt.metadata["normalize_features"] = cfg.normalize_features ? "true" : "false";
  write_checkpoint(ckpt, out / "model.ckpt");
  write_text(out / "report.json", to_json(r.report));
  write_text(out / "curve.csv", curve_csv(r.report));
  std::cout << fmt::format("test_acc {:.4f} (best val {:.4f} at epoch {})\n", r.report.test_acc,
                           r.report.best_val_acc, r.report.best_epoch);
  std::cout << "report     " << (out / "report.json").string() << "\n"
            << "curve      " << (out / "curve.csv").string() << "\n"
            << "checkpoint " << (out / "model.ckpt").string() << "\n";
  return 0;
}

int cmd_gcn_train(const Options& opt) {
  GcnConfig cfg;
  apply_entries(collect_entries(opt), [&](auto& k, auto& v) { return cfg.set(k, v); });
  cfg.validate();
  print_config("gcn-train", cfg.entries(), opt);
  GraphStore g = resolve_dataset(opt.dataset);
  const fs::path out(opt.out);
  fs::create_directories(out);
  GcnTrainResult r = gcn_train(g, cfg);
  Checkpoint ckpt = to_checkpoint(r.params);
  ckpt.metadata["normalize_features"] = cfg.normalize_features ? "true" : "false";
  write_checkpoint(ckpt, out / "gcn.ckpt");
  write_text(out / "gcn_report.json", to_json(r.report));
  write_text(out / "gcn_curve.csv", curve_csv(r.report));
  std::cout << fmt::format("test_acc {:.4f} (best val {:.4f} at epoch {})\n", r.report.test_acc,
                           r.report.best_val_acc, r.report.best_epoch);
  std::cout << "report     " << (out / "gcn_report.json").string() << "\n"
            << "checkpoint " << (out / "gcn.ckpt").string() << "\n";
  return 0;
}

int cmd_eval(const Options& opt) {
  const auto entries = collect_entries(opt);
  if (!entries.empty()) throw ConfigError("eval takes no config keys; settings come from the checkpoint");
  const Checkpoint ckpt = load_checkpoint_or_fail(opt.checkpoint);
  const auto norm = ckpt.metadata.find("normalize_features");
  const bool normalize = norm == ckpt.metadata.end() || norm->second == "true";
  print_config("eval", {{"checkpoint", opt.checkpoint}, {"kind", ckpt.kind},
                        {"normalize_features", normalize ? "true" : "false"}}, opt);
  GraphStore g = resolve_dataset(opt.dataset);
  if (!g.has_split()) throw DatasetError(DatasetErrorKind::InvalidSplit, "eval needs a dataset split");
  const SparseRows x = model_inputs(g, normalize);

  std::vector<Label> preds;
  if (ckpt.kind == "tgs") {
    const TgsParams params = tgs_params_from(ckpt);
    if (params.shape.input_dim != g.feature_dim()) throw CheckpointError("checkpoint feature dim does not match the dataset");
    preds = infer(params, x).labels;
  } else if (ckpt.kind == "gcn") {
    const GcnParams params = gcn_params_from(ckpt);
    if (params.input_dim() != g.feature_dim()) throw CheckpointError("checkpoint feature dim does not match the dataset");
    preds = argmax_rows(gcn_full_forward(params, NormalizedAdjacency::from(g), x));
  } else {
    throw CheckpointError("unknown checkpoint kind '" + ckpt.kind + "'");
  }

  nlohmann::ordered_json j;
  j["checkpoint"] = opt.checkpoint;
  j["kind"] = ckpt.kind;
  for (const auto& [name, mask] : {std::pair{"train", &g.split().train}, std::pair{"val", &g.split().val},
                                   std::pair{"test", &g.split().test}}) {
    if (count_mask(*mask) == 0) continue;
    const double acc = accuracy(preds, g.labels(), *mask);
    j[std::string(name) + "_acc"] = acc;
    std::cout << fmt::format("{:<5} acc {:.4f}\n", name, acc);
  }
  write_text(fs::path(opt.out) / "eval.json", j.dump(2) + "\n");
  std::cout << "report     " << (fs::path(opt.out) / "eval.json").string() << "\n";
  return 0;
}

int cmd_bench(const Options& opt) {
  BenchConfig cfg;
  apply_entries(collect_entries(opt), [&](auto& k, auto& v) { return cfg.set(k, v); });
  cfg.validate();
  if (!opt.random_params && opt.checkpoint.empty()) {
    throw CheckpointError("bench needs --checkpoint PATH or --random-params");
  }
  GraphStore g = resolve_dataset(opt.dataset, &cfg);

  std::vector<TimingRecord> records;
  if (opt.random_params) {
    print_config("bench", cfg.entries(), opt);
    records = depth_sweep(g, cfg);
  } else {
    const TgsParams tgs = tgs_params_from(load_checkpoint_or_fail(opt.checkpoint));
    if (tgs.shape.input_dim != g.feature_dim()) throw CheckpointError("checkpoint feature dim does not match the dataset");
    cfg.depths = {tgs.shape.num_layers};
    print_config("bench", cfg.entries(), opt);
    Rng rng(cfg.seed);
    InferenceSubjects subjects = random_subjects(g, tgs.shape.num_layers, cfg.hidden, rng);
    subjects.tgs = tgs;
    if (!opt.gcn_checkpoint.empty()) subjects.gcn = gcn_params_from(load_checkpoint_or_fail(opt.gcn_checkpoint));
    const auto queries = sample_nodes(g, cfg.node_sample, cfg.seed);
    TimingRecord gcn = time_inference(BenchMethod::GcnFull, g, subjects, queries, cfg);
    TimingRecord mlp = time_inference(BenchMethod::TgsMlp, g, subjects, queries, cfg);
    TimingRecord single = time_inference(BenchMethod::GcnSingleNode, g, subjects, queries, cfg);
    mlp.speedup = gcn.mean_ms / mlp.mean_ms;
    single.speedup = gcn.mean_ms / single.mean_ms;
    records = {mlp, gcn, single};
  }
  const fs::path out(opt.out);
  write_text(out / "bench.csv", timing_csv(records));
  const std::string table = timing_table(records);
  write_text(out / "bench_table.txt", table);
  std::cout << table << "csv        " << (out / "bench.csv").string() << "\n";
  return 0;
}

int cmd_robustness(const Options& opt) {
  SuiteConfig cfg;
  const auto index_list = [](const std::string& key, const std::string& value) {
    std::vector<Index> out;
    std::stringstream ss(value);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_index(key, item));
    return out;
  };
  const auto double_list = [](const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_double(key, item));
    return out;
  };
  std::string protocol = opt.protocol;
  apply_entries(
      collect_entries(opt), [&](auto& k, auto& v) { return cfg.tgs.set(k, v); },
      [&](const std::string& k, const std::string& v) {
        return k.rfind("gcn.", 0) == 0 && cfg.gcn.set(k.substr(4), v);
      },
      [&](const std::string& k, const std::string& v) {
        if (k == "runs") cfg.runs = parse_index(k, v);
        else if (k == "include_mlp") cfg.include_mlp = parse_bool(k, v);
        else if (k == "include_gcn") cfg.include_gcn = parse_bool(k, v);
        else if (k == "label_counts") cfg.label_counts = index_list(k, v);
        else if (k == "noise_ratios") cfg.noise_ratios = double_list(k, v);
        else if (k == "labels") {
          // shorthand: `--labels 5` runs only the limited-label protocol
          cfg.label_counts = index_list(k, v);
          protocol = "limited";
        } else if (k == "noise") {
          cfg.noise_ratios = double_list(k, v);
          protocol = "noise";
        } else return false;
        return true;
      });
  if (protocol != "both" && protocol != "limited" && protocol != "noise") {
    throw ConfigError("protocol must be limited, noise or both");
  }
  ConfigEntries entries = cfg.tgs.entries();
  for (auto& [k, v] : cfg.gcn.entries()) entries.emplace_back("gcn." + k, v);
  std::string labels, noise;
  for (Index k : cfg.label_counts) labels += (labels.empty() ? "" : ",") + std::to_string(k);
  for (double r : cfg.noise_ratios) noise += (noise.empty() ? "" : ",") + format_double(r);
  entries.insert(entries.end(), {{"protocol", protocol},
                                 {"runs", std::to_string(cfg.runs)},
                                 {"include_mlp", cfg.include_mlp ? "true" : "false"},
                                 {"include_gcn", cfg.include_gcn ? "true" : "false"},
                                 {"label_counts", labels},
                                 {"noise_ratios", noise}});
  cfg.tgs.validate();
  cfg.gcn.validate();
  print_config("robustness", entries, opt);
  GraphStore g = resolve_dataset(opt.dataset);
  std::vector<SuiteRow> rows;
  if (protocol != "noise") rows = run_robustness_suite(g, cfg, Protocol::LimitedLabels);
  if (protocol != "limited") {
    auto more = run_robustness_suite(g, cfg, Protocol::LabelNoise);
    rows.insert(rows.end(), more.begin(), more.end());
  }
  write_text(fs::path(opt.out) / "robustness.csv", suite_csv(rows));
  std::cout << suite_table(rows) << "csv        " << (fs::path(opt.out) / "robustness.csv").string() << "\n";
  return 0;
}

int cmd_ablation(const Options& opt) {
  TrainConfig cfg;
  Index runs = 5;
  apply_entries(
      collect_entries(opt), [&](auto& k, auto& v) { return cfg.set(k, v); },
      [&](const std::string& k, const std::string& v) {
        if (k != "runs") return false;
        runs = parse_index(k, v);
        return true;
      });
  cfg.validate();
  ConfigEntries entries = cfg.entries();
  entries.emplace_back("runs", std::to_string(runs));
  print_config("ablation", entries, opt);
  GraphStore g = resolve_dataset(opt.dataset);
  const auto rows = run_ablation_matrix(g, cfg, runs);
  write_text(fs::path(opt.out) / "ablation.csv", suite_csv(rows));
  std::cout << suite_table(rows) << "csv        " << (fs::path(opt.out) / "ablation.csv").string() << "\n";
  return 0;
}

int cmd_generate(const Options& opt) {
  const auto entries = collect_entries(opt);
  GraphStore g = [&] {
    if (opt.kind == "standin") {
      if (!entries.empty()) throw ConfigError("the stand-in takes no config keys");
      return cora_standin();
    }
    if (opt.kind == "synthetic") {
      BenchConfig cfg;
      apply_entries(entries, [&](auto& k, auto& v) { return cfg.set(k, v); });
      Rng rng(cfg.seed);
      return gen_synthetic(cfg.synthetic, rng);
    }
    throw ConfigError("--kind must be standin or synthetic");
  }();
  save_dataset(g, opt.out);
  std::cout << "wrote " << g.num_nodes() << " nodes, " << g.num_edges() << " edges to " << opt.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_process();
  CLI::App app{"Graph self-distillation MLPs: training, evaluation and benchmarks"};
  app.require_subcommand(1);
  Options opt;

  const auto common = [&](CLI::App* sub, bool dataset = true) {
    sub->allow_extras();
    sub->add_option("--config", opt.config_path, "key = value config file");
    if (dataset) {
      sub->add_option("--dataset", opt.dataset,
                      std::string("dataset directory (relative names resolve under $") + kDataRootEnv +
                          "), or 'standin'");
    }
    sub->add_option("--seed", opt.seed, "seed for every random stream");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
  };

  auto* validate = app.add_subcommand("validate", "load a dataset and print its statistics");
  common(validate);
  auto* train = app.add_subcommand("train", "train TGS and write report, curve and checkpoint");
  common(train);
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  common(eval);
  eval->add_option("--checkpoint", opt.checkpoint, "checkpoint path");
  auto* bench = app.add_subcommand("bench", "inference timing: TGS-MLP vs full and single-node GCN");
  common(bench);
  bench->add_option("--checkpoint", opt.checkpoint, "trained TGS checkpoint");
  bench->add_option("--gcn-checkpoint", opt.gcn_checkpoint, "trained GCN checkpoint");
  bench->add_flag("--random-params", opt.random_params, "sweep depths with random parameters");
  auto* robustness = app.add_subcommand("robustness", "limited-label and label-noise suites");
  common(robustness);
  robustness->add_option("--protocol", opt.protocol, "limited, noise or both")->capture_default_str();
  auto* ablation = app.add_subcommand("ablation", "five-row ablation matrix");
  common(ablation);
  auto* gcn = app.add_subcommand("gcn-train", "train the GCN baseline");
  common(gcn);
  auto* generate = app.add_subcommand("generate", "write a generated dataset to --out");
  common(generate, false);
  generate->add_option("--kind", opt.kind, "standin or synthetic")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  opt.extras = sub->remaining();
  try {
    if (sub == validate) return cmd_validate(opt);
    if (sub == train) return cmd_train(opt);
    if (sub == eval) return cmd_eval(opt);
    if (sub == bench) return cmd_bench(opt);
    if (sub == robustness) return cmd_robustness(opt);
    if (sub == ablation) return cmd_ablation(opt);
    if (sub == gcn) return cmd_gcn_train(opt);
    if (sub == generate) return cmd_generate(opt);
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return 1;
  } catch (const DatasetError& e) {
    spdlog::error("dataset error: {}", e.what());
    return 2;
  } catch (const DivergenceError& e) {
    spdlog::error("training diverged at epoch {}: {}", e.epoch(), e.what());
    return 3;
  } catch (const NumericError& e) {
    spdlog::error("numeric failure: {}", e.what());
    return 3;
  } catch (const CheckpointError& e) {
    spdlog::error("checkpoint error: {}", e.what());
    return 4;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 5;
  }
  return 5;
}
