#include "tgs/bench/bench.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "tgs/error.hpp"
#include "tgs/model/model.hpp"
#include "tgs/train/report.hpp"
#include "tgs/train/trainer.hpp"

namespace tgs {

const char* to_string(BenchMethod m) {
  switch (m) {
    case BenchMethod::TgsMlp:
      return "tgs_mlp";
    case BenchMethod::GcnFull:
      return "gcn_full";
    case BenchMethod::GcnSingleNode:
      return "gcn_single_node";
  }
  return "unknown";
}

void BenchConfig::validate() const {
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (warmup < 1) throw ConfigError("warmup must be >= 1");
  if (depths.empty()) throw ConfigError("depths must not be empty");
  for (Index d : depths)
    if (d < 1) throw ConfigError("depths must be >= 1");
  if (hidden < 1) throw ConfigError("hidden must be >= 1");
}

bool BenchConfig::set(const std::string& key, const std::string& value) {
  if (key == "repetitions") repetitions = parse_index(key, value);
  else if (key == "warmup") warmup = parse_index(key, value);
  else if (key == "depths") {
    depths.clear();
    std::size_t start = 0;
    while (start <= value.size()) {
      const auto comma = value.find(',', start);
      const std::string item = value.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      depths.push_back(parse_index(key, item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  } else if (key == "node_sample") node_sample = parse_index(key, value);
  else if (key == "bench_hidden") hidden = parse_index(key, value);
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "reuse_cache") reuse_cache = parse_bool(key, value);
  else if (key == "normalize_features") normalize_features = parse_bool(key, value);
  else if (key == "synthetic_nodes") synthetic.nodes = parse_index(key, value);
  else if (key == "synthetic_degree") synthetic.avg_degree = parse_double(key, value);
  else if (key == "synthetic_feature_dim") synthetic.feature_dim = parse_index(key, value);
  else if (key == "synthetic_classes") synthetic.classes = parse_index(key, value);
  else if (key == "synthetic_model") {
    if (value == "regular") synthetic.model = SyntheticModel::RegularRandom;
    else if (value == "power_law") synthetic.model = SyntheticModel::PowerLaw;
    else throw ConfigError("synthetic_model must be regular or power_law, got '" + value + "'");
  } else return false;
  return true;
}

ConfigEntries BenchConfig::entries() const {
  std::string ds;
  for (Index d : depths) ds += (ds.empty() ? "" : ",") + std::to_string(d);
  return {{"repetitions", std::to_string(repetitions)},
          {"warmup", std::to_string(warmup)},
          {"depths", ds},
          {"node_sample", std::to_string(node_sample)},
          {"bench_hidden", std::to_string(hidden)},
          {"seed", std::to_string(seed)},
          {"reuse_cache", reuse_cache ? "true" : "false"},
          {"normalize_features", normalize_features ? "true" : "false"},
          {"synthetic_nodes", std::to_string(synthetic.nodes)},
          {"synthetic_degree", format_double(synthetic.avg_degree)},
          {"synthetic_model", synthetic.model == SyntheticModel::RegularRandom ? "regular" : "power_law"},
          {"synthetic_feature_dim", std::to_string(synthetic.feature_dim)},
          {"synthetic_classes", std::to_string(synthetic.classes)}};
}

InferenceSubjects random_subjects(const GraphStore& g, Index depth, Index hidden, Rng& rng) {
  InferenceSubjects s;
  s.tgs = TgsParams::init({g.feature_dim(), hidden, g.num_classes(), depth}, rng);
  s.gcn = GcnParams::init(g.feature_dim(), hidden, g.num_classes(), depth, rng);
  return s;
}

std::vector<NodeId> sample_nodes(const GraphStore& g, Index sample, std::uint64_t seed) {
  const Index n = g.num_nodes();
  std::vector<NodeId> all(n);
  for (NodeId v = 0; v < n; ++v) all[v] = v;
  if (sample == 0 || sample >= n) return all;
  Rng rng(seed);
  for (Index i = 0; i < sample; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(sample);
  std::sort(all.begin(), all.end());
  return all;
}

namespace {

template <typename Fn>
std::pair<double, double> time_calls(const BenchConfig& cfg, Fn&& fn) {
  for (Index i = 0; i < cfg.warmup; ++i) fn();
  std::vector<double> ms;
  ms.reserve(cfg.repetitions);
  for (Index i = 0; i < cfg.repetitions; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return mean_std(ms);
}

// Keeps results observable so the timed work cannot be elided.
volatile Label g_sink = 0;

}  // namespace

TimingRecord time_inference(BenchMethod method, const GraphStore& g, const InferenceSubjects& subjects,
                            std::span<const NodeId> queries, const BenchConfig& cfg) {
  cfg.validate();
  Eigen::setNbThreads(1);
  const SparseRows x = model_inputs(g, cfg.normalize_features);
  TimingRecord rec;
  rec.method = to_string(method);
  rec.nodes = queries.size();
  std::vector<Index> rows(queries.begin(), queries.end());

  switch (method) {
    case BenchMethod::TgsMlp: {
      rec.depth = subjects.tgs.shape.num_layers;
      const SparseRows staged = x.gather(rows);
      const TgsParams& params = subjects.tgs;
      std::tie(rec.mean_ms, rec.std_ms) = time_calls(cfg, [&] { g_sink = infer(params, staged).labels.back(); });
      rec.fetches = queries.size();
      rec.adjacency_reads = 0;
      break;
    }
    case BenchMethod::GcnFull: {
      rec.depth = subjects.gcn.num_layers();
      const NormalizedAdjacency adj = NormalizedAdjacency::from(g);
      const GcnParams& params = subjects.gcn;
      std::tie(rec.mean_ms, rec.std_ms) = time_calls(cfg, [&] {
        const Matrix logits = gcn_full_forward(params, adj, x);
        g_sink = argmax_rows(softmax_rows(logits.gather_rows(rows))).back();
      });
      rec.fetches = g.num_nodes();
      rec.adjacency_reads = g.num_nodes() * params.num_layers();
      break;
    }
    case BenchMethod::GcnSingleNode: {
      rec.depth = subjects.gcn.num_layers();
      const NormalizedAdjacency adj = NormalizedAdjacency::from(g);
      const GcnParams& params = subjects.gcn;
      for (NodeId v : queries) {
        const SingleNodeResult r = gcn_infer_single_node(params, g, adj, x, v);
        rec.fetches += r.fetches;
        rec.adjacency_reads += r.adjacency_reads;
      }
      if (cfg.reuse_cache) {
        GcnReuseCache cache;
        rec.fetches = rec.adjacency_reads = 0;
        for (NodeId v : queries) {
          const SingleNodeResult r = gcn_infer_single_node(params, g, adj, x, v, &cache);
          rec.fetches += r.fetches;
          rec.adjacency_reads += r.adjacency_reads;
        }
      }
      std::tie(rec.mean_ms, rec.std_ms) = time_calls(cfg, [&] {
        GcnReuseCache cache;
        for (NodeId v : queries) {
          const SingleNodeResult r = gcn_infer_single_node(params, g, adj, x, v, cfg.reuse_cache ? &cache : nullptr);
          Matrix logits(1, r.logits.size());
          std::copy(r.logits.begin(), r.logits.end(), logits.values().begin());
          g_sink = argmax_rows(softmax_rows(logits)).front();
        }
      });
      break;
    }
  }
  return rec;
}

std::vector<TimingRecord> depth_sweep(const GraphStore& g, const BenchConfig& cfg) {
  cfg.validate();
  const std::vector<NodeId> queries = sample_nodes(g, cfg.node_sample, cfg.seed);
  std::vector<TimingRecord> out;
  for (Index depth : cfg.depths) {
    Rng rng(cfg.seed + 7919 * depth);
    const InferenceSubjects subjects = random_subjects(g, depth, cfg.hidden, rng);
    TimingRecord gcn = time_inference(BenchMethod::GcnFull, g, subjects, queries, cfg);
    TimingRecord tgs = time_inference(BenchMethod::TgsMlp, g, subjects, queries, cfg);
    TimingRecord single = time_inference(BenchMethod::GcnSingleNode, g, subjects, queries, cfg);
    tgs.speedup = tgs.mean_ms > 0.0 ? gcn.mean_ms / tgs.mean_ms : 0.0;
    single.speedup = single.mean_ms > 0.0 ? gcn.mean_ms / single.mean_ms : 0.0;
    out.push_back(tgs);
    out.push_back(gcn);
    out.push_back(single);
  }
  return out;
}

std::string timing_csv(const std::vector<TimingRecord>& records) {
  std::string out = "method,depth,mean_ms,std_ms,fetches,speedup\n";
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{}\n", r.method, r.depth, r.mean_ms, r.std_ms, r.fetches, r.speedup);
  }
  return out;
}

std::string timing_table(const std::vector<TimingRecord>& records) {
  std::string out = fmt::format("{:<16} {:>5} {:>12} {:>11} {:>10} {:>10} {:>7} {:>9}\n", "method", "depth", "mean_ms",
                                "std_ms", "fetches", "adj_reads", "nodes", "speedup");
  for (const auto& r : records) {
    out += fmt::format("{:<16} {:>5} {:>12.5f} {:>11.5f} {:>10} {:>10} {:>7} {:>8.2f}x\n", r.method, r.depth,
                       r.mean_ms, r.std_ms, r.fetches, r.adjacency_reads, r.nodes, r.speedup);
  }
  return out;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: x is constant");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace tgs
