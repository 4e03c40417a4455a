#pragma once

#include <span>
#include <vector>

#include "tgs/graph/graph_store.hpp"
#include "tgs/model/params.hpp"
#include "tgs/numeric/layers.hpp"
#include "tgs/numeric/sparse.hpp"
#include "tgs/sampler/sampler.hpp"

namespace tgs {

// ---------------------------------------------------------------------------
// Backbone: H^(l+1) = Dropout(BN(ReLU(H^(l) W^(l)))), H^(0) = X
// ---------------------------------------------------------------------------

struct BackboneCache {
  SparseRows input;
  std::vector<LayerCache> layers;
};

/// Eval mode: running batch-norm statistics, no dropout.
Matrix backbone_forward(const TgsParams& params, const SparseRows& x);
Matrix backbone_forward(const TgsParams& params, const Matrix& x);

/// Training mode: batch statistics (running averages updated in `params`),
/// inverted dropout with probability `dropout`; fills `cache`.
Matrix backbone_forward_train(TgsParams& params, const SparseRows& x, double dropout, Rng& rng,
                              BackboneCache& cache);

/// Accumulates ∂/∂W^(l) and ∂/∂(BN scale, shift) into `grads`.
void backbone_backward(const TgsParams& params, const BackboneCache& cache, const Matrix& grad_embeddings,
                       TgsParams& grads);

// ---------------------------------------------------------------------------
// Learnable mixup
// ---------------------------------------------------------------------------

/// β = sigmoid(aᵀ [x_i W_m ‖ x_j W_m]) for dense feature rows x_i, x_j.
double mixup_coefficient(const TgsParams& params, std::span<const double> x_i, std::span<const double> x_j);

/// Row-wise g(β h_j + (1−β) h_i).
Matrix mixup_head(const TgsParams& params, const Matrix& h_i, const Matrix& h_j, std::span<const double> beta);

enum class MixupMode {
  Learned,
  /// β ≡ 1: the positive target is the plain neighbor prediction g(h_j).
  Disabled,
};

enum class ForwardMode { Train, Eval };

struct ForwardOptions {
  double dropout = 0.5;
  MixupMode mixup = MixupMode::Learned;
};

/// Everything a batch step computes on the way to the losses.
///
/// Directed pair p = 2e + side anchors at one endpoint of batch edge e and
/// interpolates toward the other: pair_anchor[p]/pair_partner[p] are local
/// row indices into `nodes`.
struct ForwardBundle {
  std::vector<NodeId> nodes;  // sorted, unique
  SparseRows inputs;          // feature rows of `nodes`
  BackboneCache backbone;     // only in training mode
  bool training = false;
  MixupMode mixup = MixupMode::Learned;

  Matrix embeddings;  // h^(L), |nodes|×F
  Matrix y;           // f(h), |nodes|×C
  Matrix z;           // g(h)
  Matrix y_prob;      // softmax(y)
  Matrix z_prob;      // softmax(z)

  std::vector<Index> pair_anchor;
  std::vector<Index> pair_partner;
  Matrix projected;           // x W_m for every node row (learned mixup only)
  std::vector<double> beta;   // per pair
  Matrix mixed;               // β h_partner + (1−β) h_anchor, pairs×F
  Matrix z_mix;               // g(mixed), pairs×C

  /// Local row of a node; throws std::out_of_range if absent.
  Index local(NodeId v) const;
};

/// Forwards the union of batch endpoints, negative nodes and `extra_nodes`.
/// In training mode `params` batch-norm running statistics are updated.
ForwardBundle forward_batch(TgsParams& params, const SparseRows& features, const EdgeBatch& batch, ForwardMode mode,
                            const ForwardOptions& opts, Rng& rng, std::span<const NodeId> extra_nodes = {});

/// Gradients of a scalar loss with respect to the bundle's head outputs.
struct HeadGradients {
  Matrix y;
  Matrix z;
  Matrix z_mix;

  static HeadGradients zeros_for(const ForwardBundle& bundle);
};

struct FeatureLossOptions {
  bool use_negatives = true;
  /// Compare softmax(y) with softmax(z') in the positive term instead of raw outputs.
  bool normalize_positive_term = false;
};

/// Σ_p w_p ‖y_anchor − z'_p‖² − Σ_neg w ‖ŷ_anchor − ẑ_k‖², weights from the batch.
/// Adds scale·∂L/∂(y, z, z') into `grads` when non-null.
double feature_loss_batch(const ForwardBundle& bundle, const EdgeBatch& batch, const FeatureLossOptions& opts,
                          HeadGradients* grads = nullptr, double scale = 1.0);

/// (1/|V_b|) Σ_{i∈V_b} [CE(y_i, ŷ_i) + Σ_{batch edges (i,j)} CE(y_i, ẑ_j)] where
/// V_b holds the labeled (train-mask) endpoints of the batch; 0 when V_b is
/// empty. `neighbor_terms = false` keeps only the CE(y_i, ŷ_i) part.
double label_loss_batch(const ForwardBundle& bundle, const EdgeBatch& batch, std::span<const Label> labels,
                        const Mask& train_mask, bool neighbor_terms = true, HeadGradients* grads = nullptr,
                        double scale = 1.0);

/// Plain classification loss: mean CE(y_i, ŷ_i) over bundle nodes in the train mask.
double supervised_loss(const ForwardBundle& bundle, std::span<const Label> labels, const Mask& train_mask,
                       HeadGradients* grads = nullptr, double scale = 1.0);

/// label + α·feature. Throws ConfigError for α < 0.
double total_loss(double feature_loss, double label_loss, double alpha);

/// Backpropagates head-output gradients through heads, mixup and backbone,
/// accumulating into `grads` (same layout as params).
void backward_batch(const TgsParams& params, const ForwardBundle& bundle, const HeadGradients& head_grads,
                    TgsParams& grads);

// ---------------------------------------------------------------------------
// Structure-free inference
// ---------------------------------------------------------------------------

struct Prediction {
  std::vector<Label> labels;  // argmax, ties to the lowest class id
  Matrix probabilities;       // softmax(f(backbone(x)))
};

/// Takes feature rows only; the classifier never sees adjacency.
Prediction infer(const TgsParams& params, const SparseRows& rows);
Prediction infer(const TgsParams& params, const Matrix& rows);
/// f(backbone(x)) before softmax.
Matrix infer_logits(const TgsParams& params, const SparseRows& rows);

/// Row-wise argmax with ties broken toward the lowest index.
std::vector<Label> argmax_rows(const Matrix& m);

}  // namespace tgs
