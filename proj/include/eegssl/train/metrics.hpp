// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace eegssl::train {

/// Mann-Whitney AUROC: (concordant + 0.5 * tied) / (n_pos * n_neg).
/// Throws ConfigError unless both classes are present.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct SplitCounts {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
  bool operator==(const SplitCounts&) const = default;
};

struct EvalReport {
  double auroc = 0.0;
  double auroc_mean = 0.0;
  double auroc_std = 0.0;
  int epochs = 0;
  std::vector<double> train_loss;
  std::vector<double> val_auroc;
  SplitCounts counts;
  /// Per-repeat test AUROC when the report aggregates several runs.
  std::vector<double> repeats;

  bool operator==(const EvalReport&) const = default;
};

void to_json(nlohmann::json& j, const EvalReport& r);
void from_json(const nlohmann::json& j, EvalReport& r);

/// Mean and sample standard deviation of per-run AUROCs.
EvalReport aggregate(std::span<const EvalReport> runs);

}  // namespace eegssl::train
