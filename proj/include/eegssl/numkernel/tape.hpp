// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eegssl/numkernel/param_store.hpp"
#include "eegssl/numkernel/tensor.hpp"

namespace eegssl::num {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid as long as the
/// tape that produced it.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  Tape& tape() const { return *tape_; }
  std::size_t index() const { return index_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  std::size_t index_ = 0;
};

/// Reverse-mode tape. Ops append nodes in evaluation order; backward visits
/// them in exact reverse. One tape per thread.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);

  /// Leaf for a named parameter. Repeated calls with the same name return
  /// the same node.
  Var param(const ParamStore& store, const std::string& name);

  /// Appends an op node. `backward` reads grad(self) and calls accumulate()
  /// on its inputs; it is skipped when no input requires a gradient.
  Var record(std::string_view op, Tensor value, std::initializer_list<Var> inputs,
             Backward backward);
  Var record(std::string_view op, Tensor value, std::span<const Var> inputs,
             Backward backward);

  const Tensor& value(std::size_t index) const { return nodes_[index].value; }
  const Tensor& grad(std::size_t index) const { return nodes_[index].grad; }
  std::size_t input(std::size_t index, std::size_t k) const { return nodes_[index].inputs[k]; }
  bool requires_grad(std::size_t index) const { return nodes_[index].requires_grad; }
  void accumulate(std::size_t index, Tensor g);

  /// Gradient of a scalar `loss` for every parameter in `params`. Parameters
  /// not reachable from the loss get a zero tensor of their shape.
  GradMap backward(Var loss, const ParamStore& params);

  std::size_t size() const { return nodes_.size(); }

  /// When enabled (the default) every recorded value is checked and a
  /// NonFiniteError naming the op is thrown on NaN/Inf.
  void set_check_finite(bool enabled) { check_finite_ = enabled; }

 private:
  struct Node {
    std::string_view op;
    Tensor value;
    Tensor grad;
    std::vector<std::size_t> inputs;
    Backward backward;
    bool requires_grad = false;
  };

  Var push(Node node);

  std::vector<Node> nodes_;
  std::map<std::string, std::size_t> param_nodes_;
  bool check_finite_ = true;
};

// Differentiable ops. All operands must live on the same tape.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// alpha * a + beta, elementwise.
Var affine(Var a, double alpha, double beta);
Var matmul(Var a, Var b);
/// Adds a 1xC row to every row of an RxC matrix.
Var add_row_bias(Var a, Var bias);
Var concat_cols(std::span<const Var> parts);
Var concat_cols(std::initializer_list<Var> parts);
Var slice_cols(Var a, std::size_t begin, std::size_t end);
Var sigmoid(Var a);
Var tanh(Var a);
Var abs(Var a);
Var mean(Var a);
Var sum(Var a);

/// Row-block graph propagation. `x` stacks B blocks of N rows; block b is
/// left-multiplied by transitions[b] (or transitions[0] for every block when
/// a single matrix is given). Transitions are constants.
Var propagate(std::shared_ptr<const std::vector<Tensor>> transitions, Var x);

/// Mean over each consecutive block of `block` rows: [B*block, F] -> [B, F].
Var block_mean_rows(Var x, std::size_t block);

/// Mean binary cross-entropy of sigmoid(logits) against constant labels,
/// computed in the numerically stable softplus form.
Var bce_with_logits(Var logits, const Tensor& labels);

/// mean(|prediction - target|).
Var mean_abs_error(Var prediction, Var target);

}  // namespace eegssl::num
