#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tgs/bench/synthetic.hpp"
#include "tgs/gcn/gcn.hpp"
#include "tgs/model/params.hpp"
#include "tgs/train/config.hpp"

namespace tgs {

enum class BenchMethod { TgsMlp, GcnFull, GcnSingleNode };

const char* to_string(BenchMethod m);

struct BenchConfig {
  Index repetitions = 30;
  Index warmup = 3;
  std::vector<Index> depths{2};
  /// Query nodes per timed call; 0 means every node.
  Index node_sample = 10;
  Index hidden = 16;
  std::uint64_t seed = 0;
  /// Single-node GCN reuses rows across the sampled queries.
  bool reuse_cache = false;
  bool normalize_features = true;
  /// Graph generated when no dataset is given (`synthetic_*` keys).
  SyntheticSpec synthetic;

  /// Throws ConfigError.
  void validate() const;
  bool set(const std::string& key, const std::string& value);
  ConfigEntries entries() const;
};

struct TimingRecord {
  std::string method;
  Index depth = 0;
  double mean_ms = 0.0;  // per timed call (one call answers every sampled node)
  double std_ms = 0.0;
  Index fetches = 0;          // node-feature rows read per call
  Index adjacency_reads = 0;  // neighbor lists read per call
  double speedup = 1.0;       // GCN-full mean / this mean at the same depth
  Index nodes = 0;            // nodes answered per call
};

/// Parameters benchmarked at one depth.
struct InferenceSubjects {
  TgsParams tgs;
  GcnParams gcn;
};

/// Random Glorot parameters with `depth` layers of width `hidden`.
InferenceSubjects random_subjects(const GraphStore& g, Index depth, Index hidden, Rng& rng);

/// Deterministic query sample (seeded; all nodes when sample is 0 or ≥ N).
std::vector<NodeId> sample_nodes(const GraphStore& g, Index sample, std::uint64_t seed);

/// Times the full predict path (forward, softmax, argmax) of one method on
/// the query nodes with a monotonic clock. Inputs are staged before the
/// timed region; the TGS region receives feature rows only.
TimingRecord time_inference(BenchMethod method, const GraphStore& g, const InferenceSubjects& subjects,
                            std::span<const NodeId> queries, const BenchConfig& cfg);

/// TGS-MLP, GCN-full and GCN-single-node at each configured depth with
/// random parameters; speedups relative to GCN-full at the same depth.
std::vector<TimingRecord> depth_sweep(const GraphStore& g, const BenchConfig& cfg);

/// `method,depth,mean_ms,std_ms,fetches,speedup`
std::string timing_csv(const std::vector<TimingRecord>& records);
/// Human-readable table including adjacency reads and node counts.
std::string timing_table(const std::vector<TimingRecord>& records);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares y ≈ slope·x + intercept. Throws std::invalid_argument for
/// fewer than two points or constant x.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tgs
