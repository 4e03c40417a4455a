#pragma once

#include "tgs/error.hpp"
#include "tgs/graph/graph_store.hpp"
#include "tgs/model/params.hpp"
#include "tgs/numeric/sparse.hpp"
#include "tgs/train/config.hpp"
#include "tgs/train/report.hpp"

namespace tgs {

/// Loss or gradients became non-finite. Carries the parameters from the start
/// of the failing epoch.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, TgsParams last_good, Index epoch)
      : NumericError(what), last_good_(std::move(last_good)), epoch_(epoch) {}
  const TgsParams& last_good() const { return last_good_; }
  Index epoch() const { return epoch_; }

 private:
  TgsParams last_good_;
  Index epoch_;
};

struct TrainResult {
  TgsParams params;  // best-validation snapshot
  RunReport report;
};

/// Feature matrix as the model consumes it (row-L1-normalized when the
/// config asks for it).
SparseRows model_inputs(const GraphStore& g, bool normalize);

/// Trains TGS on `g` (which must carry a split with a non-empty train mask).
///
/// Each epoch walks a fresh permutation of the edges in batches of cfg.batch,
/// draws negatives, steps Adam on ℒ_label + α·ℒ_feat, then evaluates on the
/// whole graph. In vanilla-MLP mode (α = 0, no label self-distillation) each
/// epoch is one full-batch cross-entropy step on the train nodes instead.
TrainResult train(const GraphStore& g, const TrainConfig& cfg);

/// cfg.seed, cfg.seed + 1, ... Throws std::invalid_argument for runs == 0.
RepeatedReport run_repeated(const GraphStore& g, const TrainConfig& cfg, Index runs);

/// Eval-mode embeddings h^(L) for every node.
Matrix node_embeddings(const TgsParams& params, const SparseRows& inputs);

}  // namespace tgs
