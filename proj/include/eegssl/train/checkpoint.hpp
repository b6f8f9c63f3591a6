// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eegssl/numkernel/param_store.hpp"

namespace eegssl::train {

inline constexpr char kCheckpointMagic[8] = {'G', 'S', 'F', 'C', 'K', 'P', 'T', '1'};
inline constexpr int kCheckpointFormatVersion = 1;

/// On disk (little-endian): the 8-byte magic "GSFCKPT1", a uint64 header
/// length, the JSON header, then every parameter as raw float64 values in
/// name order. The header carries the config snapshot, epoch, RNG state and
/// for each tensor its name, shape, byte offset into the data section and
/// element count.
struct Checkpoint {
  int format_version = kCheckpointFormatVersion;
  nlohmann::json config;
  num::ParamStore params;
  int epoch = 0;
  std::string rng_state;
  nlohmann::json metadata = nlohmann::json::object();

  std::vector<std::uint8_t> serialize() const;
  static Checkpoint deserialize(const std::vector<std::uint8_t>& bytes);

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace eegssl::train
