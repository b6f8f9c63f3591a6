// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eegssl/graphs/graphs.hpp"
#include "eegssl/model/model.hpp"
#include "eegssl/numkernel/param_store.hpp"
#include "eegssl/pretext/pretext.hpp"
#include "eegssl/signal/signal.hpp"
#include "eegssl/train/checkpoint.hpp"
#include "eegssl/train/config.hpp"
#include "eegssl/train/metrics.hpp"

namespace eegssl::train {

/// Uniform in +-sqrt(6 / (rows + cols)) for a rows x cols matrix.
num::Tensor glorot_uniform(const num::Shape& shape, std::uint64_t seed);

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
/// Each tensor draws from its own stream keyed by (seed, name), so one
/// parameter's values do not depend on which others exist.
num::ParamStore init_params(const model::DcgruConfig& cfg, std::uint64_t seed);

/// Copy of the entries of `params` whose names start with any of `prefixes`.
num::ParamStore select_params(const num::ParamStore& params,
                              std::initializer_list<std::string_view> prefixes);

/// Adam with bias-corrected first and second moments.
class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  /// Updates every parameter that has an entry in `grads`, in name order.
  void step(num::ParamStore& params, const num::GradMap& grads);
  std::uint64_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::map<std::string, num::Tensor> m_, v_;
};

/// Graphs for a set of samples: either one shared graph or one per sample.
class GraphSet {
 public:
  GraphSet() = default;
  explicit GraphSet(graphs::Graph shared);
  explicit GraphSet(std::vector<graphs::Graph> per_sample);

  bool is_shared() const { return per_sample_.empty(); }
  std::size_t size() const { return per_sample_.size(); }
  const graphs::Graph& at(std::size_t sample) const;
  model::GraphSupports supports(std::span<const std::size_t> samples) const;

 private:
  std::vector<graphs::Graph> per_sample_;
  graphs::Graph shared_;
  model::GraphSupports shared_supports_;
};

/// Distance mode: one graph from the layout. Correlation mode: one graph per
/// window, built from that (clean) window.
GraphSet build_graphs(const TrainConfig& cfg, std::span<const signal::SignalWindow> windows,
                      const graphs::ElectrodeLayout& layout);

struct PretrainResult {
  Checkpoint checkpoint;
  std::vector<double> epoch_loss;
};

/// Called after each epoch with (epoch, mean loss).
using EpochCallback = std::function<void(int, double)>;

/// Denoising pretraining: MAE between the decoder output and the featurized
/// clean window, given the featurized corrupted window. `graphs` is aligned
/// with `pairs`. Starts from init_params(cfg.model, cfg.seed) unless
/// `initial` is given.
PretrainResult pretrain(std::span<const pretext::PretextPair> pairs, const GraphSet& graphs,
                        const TrainConfig& cfg, const num::ParamStore* initial = nullptr,
                        const EpochCallback& on_epoch = {});

/// encoder.* copied from the checkpoint; classifier.* drawn fresh from
/// init_params(cfg, seed); decoder.* dropped. Throws ConfigError listing
/// every differing model field when architectures disagree.
num::ParamStore transfer_weights(const Checkpoint& pretrained, const model::DcgruConfig& cfg,
                                 std::uint64_t seed);

/// Encoder and classifier weights with no pretraining.
num::ParamStore fresh_classifier_weights(const model::DcgruConfig& cfg, std::uint64_t seed);

struct LabeledSet {
  std::vector<signal::FeatureTensor> features;
  std::vector<int> labels;
  GraphSet graphs;

  std::size_t size() const { return features.size(); }
};

struct FinetuneResult {
  Checkpoint best;
  EvalReport report;
};

/// BCE finetuning with per-epoch validation AUROC, early stopping after
/// cfg.early_stop_patience epochs without improvement, and best-validation
/// checkpoint selection (ties broken by lower validation loss).
FinetuneResult finetune(const LabeledSet& train, const LabeledSet& val,
                        const num::ParamStore& weights, const TrainConfig& cfg,
                        const EpochCallback& on_epoch = {});

/// Seizure probabilities, evaluated in batches of `batch_size`.
std::vector<double> predict(const LabeledSet& set, const num::ParamStore& weights,
                            const model::DcgruConfig& cfg, int batch_size = 64);

/// Mean BCE over a set.
double mean_bce(const LabeledSet& set, const num::ParamStore& weights,
                const model::DcgruConfig& cfg, int batch_size = 64);

}  // namespace eegssl::train
