// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "eegssl/graphs/graphs.hpp"
#include "eegssl/model/model.hpp"
#include "eegssl/pretext/pretext.hpp"

namespace eegssl::train {

/// Inverse-sigmoid teacher-forcing decay:
/// p(step) = initial_prob * c / (c + exp(step / c)).
struct ScheduledSampling {
  double initial_prob = 1.0;
  double decay_constant = 2000.0;

  double probability(std::uint64_t step) const;
  bool operator==(const ScheduledSampling&) const = default;
};

struct TrainConfig {
  int batch_size = 32;
  int pretrain_epochs = 20;
  int finetune_epochs = 30;
  double learning_rate = 1e-3;
  ScheduledSampling scheduled_sampling;
  std::uint64_t seed = 0;
  graphs::GraphMode graph_mode = graphs::GraphMode::distance;
  pretext::CorruptionSpec strategy;
  model::DcgruConfig model;

  // Featurization and graph construction.
  int feature_steps = 4;
  double kappa = 0.9;
  graphs::ThresholdMode threshold_mode = graphs::ThresholdMode::distance;
  int k_neighbors = 3;

  // Finetuning.
  int early_stop_patience = 10;
  double label_fraction = 1.0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;

  /// Batch 1500, 350 pretraining and 100 finetuning epochs.
  static TrainConfig full_scale_preset();
};

void to_json(nlohmann::json& j, const ScheduledSampling& s);
void from_json(const nlohmann::json& j, ScheduledSampling& s);
void to_json(nlohmann::json& j, const TrainConfig& c);
/// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace eegssl::train
