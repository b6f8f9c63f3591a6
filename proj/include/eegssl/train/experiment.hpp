// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eegssl/graphs/graphs.hpp"
#include "eegssl/signal/signal.hpp"
#include "eegssl/train/config.hpp"
#include "eegssl/train/metrics.hpp"
#include "eegssl/train/trainer.hpp"

namespace eegssl::train {

struct SplitWindows {
  signal::SplitManifest manifest;
  std::vector<signal::SignalWindow> train, val, test;
};

/// Splits recordings by subject and cuts each into non-overlapping windows.
SplitWindows split_windows(std::span<const signal::Recording> recordings,
                           const signal::SplitManifest& manifest, std::size_t window_samples);

/// Indices of a class-stratified subset keeping max(1, round(fraction * n_c))
/// windows of each class c, returned in increasing order.
std::vector<std::size_t> label_subset(std::span<const signal::SignalWindow> windows,
                                      double fraction, std::uint64_t seed);

/// Featurized windows with labels and graphs (correlation graphs are built
/// from the windows as given).
LabeledSet make_labeled_set(std::span<const signal::SignalWindow> windows, const TrainConfig& cfg,
                            const graphs::ElectrodeLayout& layout);

struct ArmResult {
  EvalReport report;          // test AUROC in `auroc`
  Checkpoint classifier;      // best finetuned weights
  std::vector<double> pretrain_loss;
};

/// Denoising pretraining on every training window with the configured strategy.
PretrainResult pretrain_on(const SplitWindows& data, const TrainConfig& cfg,
                           const graphs::ElectrodeLayout& layout,
                           const EpochCallback& on_epoch = {});

/// Finetunes from `pretrained` (fresh encoder when null) on a label_fraction
/// subset of training labels and reports test AUROC.
ArmResult finetune_on(const SplitWindows& data, const TrainConfig& cfg,
                      const graphs::ElectrodeLayout& layout, const Checkpoint* pretrained,
                      const EpochCallback& on_epoch = {});

double evaluate_on(std::span<const signal::SignalWindow> windows, const Checkpoint& classifier,
                   const TrainConfig& cfg, const graphs::ElectrodeLayout& layout);

/// One run of either arm: optional denoising pretraining on every training
/// window, then finetuning on a label_fraction subset of training labels,
/// then test AUROC. Correlation graphs come from the clean windows.
ArmResult run_arm(const SplitWindows& data, const TrainConfig& cfg,
                  const graphs::ElectrodeLayout& layout, bool with_pretraining);

/// `repeats` runs with seeds cfg.seed + i, aggregated.
EvalReport run_repeats(const SplitWindows& data, const TrainConfig& cfg,
                       const graphs::ElectrodeLayout& layout, bool with_pretraining, int repeats);

}  // namespace eegssl::train
