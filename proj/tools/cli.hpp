// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include <nlohmann/json_fwd.hpp>

#include "eegssl/train/config.hpp"

namespace eegssl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// A training config plus the paths and split parameters a run needs. In a
/// config file these keys sit beside the training fields at the top level.
struct ExperimentConfig {
  train::TrainConfig train;
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> layout;  // standard 10-20 when unset
  std::filesystem::path out = ".";
  int window_samples = 200;
  double val_fraction = 0.1;
  double test_fraction = 0.2;

  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

/// Runs one command line. Machine-readable JSON goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eegssl::cli
