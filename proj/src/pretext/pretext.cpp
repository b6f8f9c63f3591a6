// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/pretext/pretext.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

#include "eegssl/common/error.hpp"
#include "eegssl/common/random.hpp"

namespace eegssl::pretext {

namespace {

constexpr std::string_view kStrategyNames[] = {"jitter", "random_sample", "remove_channel",
                                               "mask_window", "jitter_window"};

std::size_t run_length(std::size_t timepoints, double point_fraction) {
  return static_cast<std::size_t>(std::floor(point_fraction * static_cast<double>(timepoints)));
}

}  // namespace

std::string_view to_string(Strategy s) { return kStrategyNames[static_cast<int>(s)]; }

Strategy parse_strategy(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kStrategyNames); ++i) {
    if (kStrategyNames[i] == s) return static_cast<Strategy>(i);
  }
  std::string valid;
  for (auto name : kStrategyNames) {
    if (!valid.empty()) valid += ", ";
    valid += name;
  }
  throw ConfigError("unknown strategy '" + std::string(s) + "'; valid strategies: " + valid);
}

std::string_view to_string(SampleMode m) {
  return m == SampleMode::neighbor_average ? "neighbor_average" : "zeros";
}

SampleMode parse_sample_mode(std::string_view s) {
  if (s == "neighbor_average") return SampleMode::neighbor_average;
  if (s == "zeros") return SampleMode::zeros;
  throw ConfigError("unknown sample mode '" + std::string(s) + "' (expected neighbor_average|zeros)");
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all = {Strategy::jitter, Strategy::random_sample,
                                            Strategy::remove_channel, Strategy::mask_window,
                                            Strategy::jitter_window};
  return all;
}

std::size_t default_removed_channel() {
  const auto& names = signal::standard_channel_names();
  return static_cast<std::size_t>(std::find(names.begin(), names.end(), "F3") - names.begin());
}

void CorruptionSpec::validate(std::size_t channels) const {
  if (!(variance_fraction >= 0.0 && variance_fraction <= 1.0)) {
    throw ConfigError("corruption: variance fraction L must lie in [0, 1]");
  }
  if (!(point_fraction >= 0.0 && point_fraction < 1.0)) {
    throw ConfigError("corruption: point fraction must lie in [0, 1)");
  }
  if (strategy == Strategy::remove_channel && channel >= channels) {
    throw ConfigError("corruption: channel " + std::to_string(channel) + " out of range for " +
                      std::to_string(channels) + " channels");
  }
}

void to_json(nlohmann::json& j, const CorruptionSpec& s) {
  j = nlohmann::json{{"strategy", to_string(s.strategy)},
                     {"variance_fraction", s.variance_fraction},
                     {"point_fraction", s.point_fraction},
                     {"channel", s.channel},
                     {"sample_mode", to_string(s.sample_mode)},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, CorruptionSpec& s) {
  if (j.contains("strategy")) s.strategy = parse_strategy(j.at("strategy").get<std::string>());
  if (j.contains("variance_fraction")) j.at("variance_fraction").get_to(s.variance_fraction);
  if (j.contains("point_fraction")) j.at("point_fraction").get_to(s.point_fraction);
  if (j.contains("channel")) j.at("channel").get_to(s.channel);
  if (j.contains("sample_mode")) s.sample_mode = parse_sample_mode(j.at("sample_mode").get<std::string>());
  if (j.contains("seed")) j.at("seed").get_to(s.seed);
}

MatrixMoments moments(const num::Tensor& m) {
  MatrixMoments out;
  const auto v = m.values();
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  for (double x : v) out.variance += (x - out.mean) * (x - out.mean);
  out.variance /= static_cast<double>(v.size());
  return out;
}

signal::SignalWindow jitter(const signal::SignalWindow& s, double variance_fraction,
                            std::uint64_t seed) {
  const MatrixMoments mom = moments(s.matrix);
  const double sd = std::sqrt(variance_fraction * mom.variance);
  Rng rng(derive_seed(seed, std::string_view("jitter")));
  signal::SignalWindow out = s;
  for (double& x : out.matrix.values()) x += rng.normal(mom.mean, sd);
  return out;
}

std::vector<std::size_t> random_sample_indices(std::size_t timepoints, double point_fraction,
                                               std::uint64_t seed, std::size_t channel) {
  if (timepoints < 3) throw ConfigError("random_sample: need at least 3 timepoints");
  const std::size_t interior = timepoints - 2;
  const auto count = static_cast<std::size_t>(std::floor(point_fraction * static_cast<double>(interior)));
  std::vector<std::size_t> pool(interior);
  for (std::size_t i = 0; i < interior; ++i) pool[i] = i + 1;
  Rng rng(derive_seed(derive_seed(seed, std::string_view("random_sample")), channel));
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                            static_cast<std::int64_t>(interior - 1)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

signal::SignalWindow random_sample(const signal::SignalWindow& s, double point_fraction,
                                   SampleMode mode, std::uint64_t seed) {
  const std::size_t len = s.timepoints();
  signal::SignalWindow out = s;
  for (std::size_t c = 0; c < s.channels(); ++c) {
    const auto idx = random_sample_indices(len, point_fraction, seed, c);
    if (mode == SampleMode::zeros) {
      for (std::size_t t : idx) out.matrix(c, t) = 0.0;
      continue;
    }
    // Walk maximal runs of consecutive replaced indices.
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && idx[j + 1] == idx[j] + 1) ++j;
      const std::size_t left = idx[i] - 1;
      const std::size_t right = idx[j] + 1;
      const double a = s.matrix(c, left);
      const double b = s.matrix(c, right);
      const double span = static_cast<double>(right - left);
      for (std::size_t t = idx[i]; t <= idx[j]; ++t) {
        const double w = static_cast<double>(t - left) / span;
        out.matrix(c, t) = (1.0 - w) * a + w * b;
      }
      i = j + 1;
    }
  }
  return out;
}

signal::SignalWindow remove_channel(const signal::SignalWindow& s, std::size_t channel) {
  if (channel >= s.channels()) {
    throw ConfigError("remove_channel: channel " + std::to_string(channel) + " out of range for " +
                      std::to_string(s.channels()) + " channels");
  }
  signal::SignalWindow out = s;
  for (std::size_t t = 0; t < s.timepoints(); ++t) out.matrix(channel, t) = 0.0;
  return out;
}

std::vector<ChannelRun> select_windows(std::size_t channels, std::size_t timepoints,
                                       double point_fraction, std::uint64_t seed) {
  const std::size_t len = run_length(timepoints, point_fraction);
  if (len < 1 || len > timepoints) {
    throw ConfigError("mask window: point fraction " + std::to_string(point_fraction) + " of " +
                      std::to_string(timepoints) + " timepoints gives an empty run");
  }
  Rng rng(derive_seed(seed, std::string_view("select_windows")));
  std::vector<ChannelRun> runs(channels);
  for (auto& r : runs) {
    r.length = len;
    r.start = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(timepoints - len)));
  }
  return runs;
}

signal::SignalWindow mask_window(const signal::SignalWindow& s, double point_fraction,
                                 std::uint64_t seed) {
  const auto runs = select_windows(s.channels(), s.timepoints(), point_fraction, seed);
  signal::SignalWindow out = s;
  for (std::size_t c = 0; c < runs.size(); ++c)
    for (std::size_t t = runs[c].start; t < runs[c].start + runs[c].length; ++t) out.matrix(c, t) = 0.0;
  return out;
}

signal::SignalWindow jitter_window(const signal::SignalWindow& s, double variance_fraction,
                                   double point_fraction, std::uint64_t seed) {
  const auto runs = select_windows(s.channels(), s.timepoints(), point_fraction, seed);
  const MatrixMoments mom = moments(s.matrix);
  const double sd = std::sqrt(variance_fraction * mom.variance);
  Rng rng(derive_seed(seed, std::string_view("jitter_window")));
  signal::SignalWindow out = s;
  for (std::size_t c = 0; c < runs.size(); ++c)
    for (std::size_t t = runs[c].start; t < runs[c].start + runs[c].length; ++t)
      out.matrix(c, t) += rng.normal(mom.mean, sd);
  return out;
}

signal::SignalWindow corrupt(const signal::SignalWindow& s, const CorruptionSpec& spec,
                             std::uint64_t seed) {
  spec.validate(s.channels());
  switch (spec.strategy) {
    case Strategy::jitter:
      return jitter(s, spec.variance_fraction, seed);
    case Strategy::random_sample:
      return random_sample(s, spec.point_fraction, spec.sample_mode, seed);
    case Strategy::remove_channel:
      return remove_channel(s, spec.channel);
    case Strategy::mask_window:
      return mask_window(s, spec.point_fraction, seed);
    case Strategy::jitter_window:
      return jitter_window(s, spec.variance_fraction, spec.point_fraction, seed);
  }
  throw ConfigError("corrupt: invalid strategy");
}

std::uint64_t pair_seed(const CorruptionSpec& spec, const signal::WindowSource& source) {
  return derive_seed(derive_seed(spec.seed, std::string_view(source.subject_id)),
                     static_cast<std::uint64_t>(source.start));
}

std::vector<PretextPair> make_pairs(std::span<const signal::SignalWindow> windows,
                                    const CorruptionSpec& spec) {
  std::vector<PretextPair> pairs;
  pairs.reserve(windows.size());
  for (const auto& w : windows) {
    pairs.push_back({corrupt(w, spec, pair_seed(spec, w.source)), w, spec});
  }
  return pairs;
}

}  // namespace eegssl::pretext
