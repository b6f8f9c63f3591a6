// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/numkernel/param_store.hpp"

namespace eegssl::num {

void ParamStore::add(const std::string& name, Tensor value) {
  auto [it, inserted] = params_.emplace(name, std::move(value));
  if (!inserted) throw std::invalid_argument("ParamStore: duplicate parameter '" + name + "'");
}

void ParamStore::set(const std::string& name, Tensor value) {
  Tensor& slot = mutable_value(name);
  if (slot.shape() != value.shape()) {
    throw ShapeError("ParamStore: parameter '" + name + "' has shape " +
                     to_string(slot.shape()) + ", cannot assign " + to_string(value.shape()));
  }
  slot = std::move(value);
}

const Tensor& ParamStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("ParamStore: no parameter '" + name + "'");
  return it->second;
}

Tensor& ParamStore::mutable_value(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("ParamStore: no parameter '" + name + "'");
  return it->second;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, _] : params_) out.push_back(name);
  return out;
}

std::size_t ParamStore::total_elements() const {
  std::size_t n = 0;
  for (const auto& [_, t] : params_) n += t.size();
  return n;
}

}  // namespace eegssl::num
