// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/train/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "eegssl/common/error.hpp"

namespace eegssl::train {

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> Checkpoint::serialize() const {
  nlohmann::json tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : params) {
    tensors.push_back({{"name", name}, {"shape", t.shape()}, {"offset", offset}, {"count", t.size()}});
    offset += 8 * t.size();
  }
  const nlohmann::json header = {{"format_version", format_version},
                                 {"config", config},
                                 {"epoch", epoch},
                                 {"rng_state", rng_state},
                                 {"metadata", metadata},
                                 {"tensors", tensors}};
  const std::string text = header.dump();

  std::vector<std::uint8_t> out;
  out.reserve(16 + text.size() + offset);
  out.insert(out.end(), std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& [_, t] : params) {
    for (double v : t.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint Checkpoint::deserialize(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16 || !std::equal(std::begin(kCheckpointMagic), std::end(kCheckpointMagic),
                                       bytes.begin())) {
    throw IoError("checkpoint: missing GSFCKPT1 magic");
  }
  const std::uint64_t header_len = get_u64(bytes.data() + 8);
  if (header_len > bytes.size() - 16) throw IoError("checkpoint: truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("checkpoint: malformed header: ") + e.what());
  }

  Checkpoint ck;
  ck.format_version = header.at("format_version").get<int>();
  if (ck.format_version != kCheckpointFormatVersion) {
    throw IoError("checkpoint: unsupported format version " + std::to_string(ck.format_version));
  }
  ck.config = header.at("config");
  ck.epoch = header.at("epoch").get<int>();
  ck.rng_state = header.at("rng_state").get<std::string>();
  ck.metadata = header.at("metadata");

  const std::uint8_t* data = bytes.data() + 16 + header_len;
  const std::size_t data_len = bytes.size() - 16 - header_len;
  for (const auto& entry : header.at("tensors")) {
    const auto shape = entry.at("shape").get<num::Shape>();
    const auto offset = entry.at("offset").get<std::uint64_t>();
    const auto count = entry.at("count").get<std::uint64_t>();
    if (count != num::element_count(shape) || offset + 8 * count > data_len) {
      throw IoError("checkpoint: tensor '" + entry.at("name").get<std::string>() + "' out of bounds");
    }
    std::vector<double> values(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      values[i] = std::bit_cast<double>(get_u64(data + offset + 8 * i));
    }
    ck.params.add(entry.at("name").get<std::string>(), num::Tensor(shape, std::move(values)));
  }
  return ck;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("failed writing " + path.string());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  return deserialize(read_file_bytes(path));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

}  // namespace eegssl::train
