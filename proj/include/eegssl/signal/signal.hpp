// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "eegssl/numkernel/tensor.hpp"

namespace eegssl::signal {

/// The 19 channels of the 10-20 montage, in the order used throughout.
const std::vector<std::string>& standard_channel_names();

/// A multichannel recording with one binary seizure mark per sample.
struct Recording {
  std::string subject_id;
  double sampling_rate_hz = 0.0;
  std::vector<std::string> channel_names;
  num::Tensor samples;  // channels x timepoints
  std::vector<std::uint8_t> labels;

  std::size_t channels() const { return samples.rank() == 2 ? samples.rows() : 0; }
  std::size_t timepoints() const { return samples.rank() == 2 ? samples.cols() : 0; }
  void validate() const;
};

struct WindowSource {
  std::string subject_id;
  std::size_t start = 0;

  auto operator<=>(const WindowSource&) const = default;
};

/// A channels x timepoints slice of a recording.
struct SignalWindow {
  num::Tensor matrix;
  int label = 0;
  WindowSource source;

  std::size_t channels() const { return matrix.rows(); }
  std::size_t timepoints() const { return matrix.cols(); }
  bool operator==(const SignalWindow&) const = default;
};

/// Log-amplitude spectra, shape steps x nodes x features.
struct FeatureTensor {
  num::Tensor values;
  WindowSource provenance;

  std::size_t steps() const { return values.shape()[0]; }
  std::size_t nodes() const { return values.shape()[1]; }
  std::size_t features() const { return values.shape()[2]; }
  /// nodes x features matrix for one step.
  num::Tensor step(std::size_t t) const;
};

struct SplitManifest {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  std::uint64_t seed = 0;

  bool operator==(const SplitManifest&) const = default;
};

void to_json(nlohmann::json& j, const SplitManifest& m);
void from_json(const nlohmann::json& j, SplitManifest& m);

struct SynthOptions {
  int n_subjects = 20;
  int windows_per_subject = 25;
  double seizure_fraction = 0.3;
  std::uint64_t seed = 0;
  double sampling_rate_hz = 50.0;
  int window_samples = 200;
  double background_amplitude = 1.0;
};

/// Synthetic EEG-like corpus: 8-12 Hz background rhythm plus noise, with
/// 3 Hz spike-wave bursts (3x background amplitude, >= 8 channels) on a
/// contiguous run of seizure windows per subject.
std::vector<Recording> synth_corpus(const SynthOptions& options);

/// Subject-level partition. Each of val/test receives max(1, round(frac*n))
/// subjects.
SplitManifest split_by_subject(std::span<const Recording> recordings, double val_frac,
                               double test_frac, std::uint64_t seed);
SplitManifest split_by_subject(std::vector<std::string> subject_ids, double val_frac,
                               double test_frac, std::uint64_t seed);

/// Non-overlapping windows; the trailing remainder is dropped.
std::vector<SignalWindow> segment_windows(const Recording& recording, double window_seconds);
std::vector<SignalWindow> segment_windows_by_length(const Recording& recording,
                                                    std::size_t window_samples);

inline constexpr double kLogFloor = 1e-8;

/// Magnitudes of the full m-point DFT of a real segment.
std::vector<double> dft_magnitudes(std::span<const double> segment);

/// Splits the window into `steps` equal sub-segments and keeps
/// log(max(|X_k|, 1e-8)) for k = 1..floor(m/2) per channel.
FeatureTensor featurize(const SignalWindow& window, std::size_t steps);

// Recording CSV: "# subject=<id> fs=<hz>", then "t,label,<channels...>",
// then one row per sample.
void write_recording_csv(const std::filesystem::path& path, const Recording& recording);
Recording read_recording_csv(const std::filesystem::path& path);

/// Every *.csv in `dir`, sorted by file name.
std::vector<Recording> load_corpus(const std::filesystem::path& dir);

}  // namespace eegssl::signal
