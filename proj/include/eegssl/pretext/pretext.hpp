// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "eegssl/signal/signal.hpp"

namespace eegssl::pretext {

enum class Strategy { jitter, random_sample, remove_channel, mask_window, jitter_window };
enum class SampleMode { neighbor_average, zeros };

std::string_view to_string(Strategy s);
/// Throws ConfigError listing the five valid names.
Strategy parse_strategy(std::string_view s);
std::string_view to_string(SampleMode m);
SampleMode parse_sample_mode(std::string_view s);
const std::vector<Strategy>& all_strategies();

/// Index of F3 in the standard channel order.
std::size_t default_removed_channel();

struct CorruptionSpec {
  Strategy strategy = Strategy::jitter;
  double variance_fraction = 0.05;  // L
  double point_fraction = 0.2;
  std::size_t channel = default_removed_channel();
  SampleMode sample_mode = SampleMode::neighbor_average;
  std::uint64_t seed = 0;

  void validate(std::size_t channels) const;
  bool operator==(const CorruptionSpec&) const = default;
};

void to_json(nlohmann::json& j, const CorruptionSpec& s);
void from_json(const nlohmann::json& j, CorruptionSpec& s);

struct PretextPair {
  signal::SignalWindow corrupted;
  signal::SignalWindow clean;
  CorruptionSpec spec;
};

/// Mean and population variance over every entry of the window.
struct MatrixMoments {
  double mean = 0.0;
  double variance = 0.0;
};
MatrixMoments moments(const num::Tensor& m);

/// Half-open [start, start + length) run per channel.
struct ChannelRun {
  std::size_t start = 0;
  std::size_t length = 0;
};

/// S + M with M ~ Normal(mean(S), L * Var(S)) drawn per entry.
signal::SignalWindow jitter(const signal::SignalWindow& s, double variance_fraction,
                            std::uint64_t seed);

/// Replaces floor(f * (T - 2)) distinct interior points per channel. In
/// neighbor_average mode every maximal run of replaced points is set to the
/// straight line between its untouched neighbours, so each replaced point
/// equals the average of its neighbours in the output.
signal::SignalWindow random_sample(const signal::SignalWindow& s, double point_fraction,
                                   SampleMode mode, std::uint64_t seed);
/// Interior indices chosen by random_sample for one channel, sorted.
std::vector<std::size_t> random_sample_indices(std::size_t timepoints, double point_fraction,
                                               std::uint64_t seed, std::size_t channel);

signal::SignalWindow remove_channel(const signal::SignalWindow& s, std::size_t channel);

/// Per-channel runs of length floor(f * T) at independent uniform starts.
std::vector<ChannelRun> select_windows(std::size_t channels, std::size_t timepoints,
                                       double point_fraction, std::uint64_t seed);

/// Zeroes the select_windows runs.
signal::SignalWindow mask_window(const signal::SignalWindow& s, double point_fraction,
                                 std::uint64_t seed);

/// Adds jitter noise inside the select_windows runs only.
signal::SignalWindow jitter_window(const signal::SignalWindow& s, double variance_fraction,
                                   double point_fraction, std::uint64_t seed);

/// Dispatches on spec.strategy with an explicit seed.
signal::SignalWindow corrupt(const signal::SignalWindow& s, const CorruptionSpec& spec,
                             std::uint64_t seed);

/// Seed for one window: a hash of the spec seed and the window's source.
std::uint64_t pair_seed(const CorruptionSpec& spec, const signal::WindowSource& source);

std::vector<PretextPair> make_pairs(std::span<const signal::SignalWindow> windows,
                                    const CorruptionSpec& spec);

}  // namespace eegssl::pretext
