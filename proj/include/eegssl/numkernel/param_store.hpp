// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <map>
#include <string>
#include <vector>

#include "eegssl/numkernel/tensor.hpp"

namespace eegssl::num {

/// Named parameters, iterated in lexicographic name order. Shapes are fixed
/// at insertion; `set` only accepts a tensor of the same shape.
class ParamStore {
 public:
  using Map = std::map<std::string, Tensor>;

  void add(const std::string& name, Tensor value);
  void set(const std::string& name, Tensor value);
  const Tensor& get(const std::string& name) const;
  Tensor& mutable_value(const std::string& name);
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  void erase(const std::string& name) { params_.erase(name); }

  std::size_t size() const { return params_.size(); }
  bool empty() const { return params_.empty(); }
  std::vector<std::string> names() const;
  std::size_t total_elements() const;

  Map::const_iterator begin() const { return params_.begin(); }
  Map::const_iterator end() const { return params_.end(); }

  bool operator==(const ParamStore& other) const = default;

 private:
  Map params_;
};

using GradMap = std::map<std::string, Tensor>;

}  // namespace eegssl::num
