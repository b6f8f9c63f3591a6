// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <stdexcept>

namespace eegssl {

/// Invalid configuration or arguments supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File missing, unreadable, or malformed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eegssl
