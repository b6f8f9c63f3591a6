// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <filesystem>
#include <string>

#include "eegssl/common/random.hpp"
#include "eegssl/numkernel/tensor.hpp"
#include "eegssl/signal/signal.hpp"

namespace eegssl::testing {

inline num::Tensor random_tensor(num::Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  num::Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

inline num::Tensor random_normal(num::Shape shape, Rng& rng, double mean = 0.0, double sd = 1.0) {
  num::Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.normal(mean, sd);
  return t;
}

/// Non-negative N x N weights with roughly `density` of the off-diagonal
/// entries set; the diagonal is set with the same probability.
inline num::Tensor random_weights(std::size_t n, Rng& rng, double density = 0.6) {
  num::Tensor w({n, n});
  for (auto& v : w.values()) v = rng.bernoulli(density) ? rng.uniform(0.05, 1.0) : 0.0;
  return w;
}

inline signal::SignalWindow random_window(std::size_t channels, std::size_t timepoints, Rng& rng,
                                          double scale = 1.0) {
  signal::SignalWindow w;
  w.matrix = random_normal({channels, timepoints}, rng, 0.3, scale);
  w.source = {"subj" + std::to_string(rng.uniform_int(0, 999)),
              static_cast<std::size_t>(rng.uniform_int(0, 10000))};
  return w;
}

/// Fresh empty directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("eegssl_" + tag + "_" + std::to_string(Rng(fnv1a(tag) ^ reinterpret_cast<std::uintptr_t>(this)).next_u64()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace eegssl::testing
