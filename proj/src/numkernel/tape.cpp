// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/numkernel/tape.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace eegssl::num {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

ConstMap as_matrix(const Tensor& t) { return ConstMap(t.values().data(), t.rows(), t.cols()); }
MutMap as_matrix(Tensor& t) { return MutMap(t.values().data(), t.rows(), t.cols()); }

Tape& same_tape(const char* op, Var a, Var b) {
  if (!a.valid() || &a.tape() != &b.tape()) {
    throw std::invalid_argument(std::string(op) + ": operands recorded on different tapes");
  }
  return a.tape();
}

template <typename F>
Tensor zip_map(const Tensor& a, const Tensor& b, F f) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
  return out;
}

}  // namespace

const Tensor& Var::value() const { return tape_->value(index_); }

Var Tape::push(Node node) {
  if (check_finite_ && !all_finite(node.value)) {
    throw NonFiniteError(std::string(node.op) + ": produced a non-finite value (shape " +
                         to_string(node.value.shape()) + ")");
  }
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.op = "constant";
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::param(const ParamStore& store, const std::string& name) {
  if (auto it = param_nodes_.find(name); it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.op = "param";
  n.value = store.get(name);
  n.requires_grad = true;
  Var v = push(std::move(n));
  param_nodes_.emplace(name, v.index());
  return v;
}

Var Tape::record(std::string_view op, Tensor value, std::initializer_list<Var> inputs,
                 Backward backward) {
  return record(op, std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(backward));
}

Var Tape::record(std::string_view op, Tensor value, std::span<const Var> inputs,
                 Backward backward) {
  Node n;
  n.op = op;
  n.value = std::move(value);
  n.inputs.reserve(inputs.size());
  for (const Var& v : inputs) {
    if (&v.tape() != this) {
      throw std::invalid_argument(std::string(op) + ": operand recorded on another tape");
    }
    n.inputs.push_back(v.index());
    n.requires_grad = n.requires_grad || nodes_[v.index()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

void Tape::accumulate(std::size_t index, Tensor g) {
  Node& n = nodes_[index];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = std::move(g);
    return;
  }
  auto dst = n.grad.values();
  auto src = g.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

GradMap Tape::backward(Var loss, const ParamStore& params) {
  if (&loss.tape() != this) throw std::invalid_argument("backward: loss is on another tape");
  if (!loss.value().is_scalar()) {
    throw ShapeError("backward: loss must be a scalar, got shape " +
                     to_string(loss.value().shape()));
  }
  for (auto& n : nodes_) n.grad = Tensor();
  accumulate(loss.index(), Tensor(loss.value().shape(), 1.0));

  for (std::size_t i = loss.index() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0 || !n.backward) continue;
    n.backward(*this, i);
  }

  GradMap grads;
  for (const auto& [name, value] : params) {
    auto it = param_nodes_.find(name);
    if (it != param_nodes_.end() && nodes_[it->second].grad.size() != 0) {
      grads.emplace(name, nodes_[it->second].grad);
    } else {
      grads.emplace(name, Tensor(value.shape()));
    }
  }
  return grads;
}

Var add(Var a, Var b) {
  Tape& t = same_tape("add", a, b);
  return t.record("add", ops::add(a.value(), b.value()), {a, b}, [](Tape& tp, std::size_t s) {
    tp.accumulate(tp.input(s, 0), tp.grad(s));
    tp.accumulate(tp.input(s, 1), tp.grad(s));
  });
}

Var sub(Var a, Var b) {
  Tape& t = same_tape("sub", a, b);
  return t.record("sub", ops::sub(a.value(), b.value()), {a, b}, [](Tape& tp, std::size_t s) {
    tp.accumulate(tp.input(s, 0), tp.grad(s));
    tp.accumulate(tp.input(s, 1), ops::scale(tp.grad(s), -1.0));
  });
}

Var mul(Var a, Var b) {
  Tape& t = same_tape("mul", a, b);
  return t.record("mul", ops::mul(a.value(), b.value()), {a, b}, [](Tape& tp, std::size_t s) {
    const auto ia = tp.input(s, 0);
    const auto ib = tp.input(s, 1);
    if (tp.requires_grad(ia)) tp.accumulate(ia, ops::mul(tp.grad(s), tp.value(ib)));
    if (tp.requires_grad(ib)) tp.accumulate(ib, ops::mul(tp.grad(s), tp.value(ia)));
  });
}

namespace {

Var affine_op(std::string_view op, Var a, double alpha, double beta) {
  Tensor out(a.value().shape());
  const Tensor& x = a.value();
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = alpha * x[i] + beta;
  return a.tape().record(op, std::move(out), {a}, [alpha](Tape& tp, std::size_t s) {
    tp.accumulate(tp.input(s, 0), ops::scale(tp.grad(s), alpha));
  });
}

}  // namespace

Var scale(Var a, double s) { return affine_op("scale", a, s, 0.0); }

Var affine(Var a, double alpha, double beta) { return affine_op("affine", a, alpha, beta); }

Var matmul(Var a, Var b) {
  Tape& t = same_tape("matmul", a, b);
  return t.record("matmul", ops::matmul(a.value(), b.value()), {a, b},
                  [](Tape& tp, std::size_t s) {
                    const auto ia = tp.input(s, 0);
                    const auto ib = tp.input(s, 1);
                    const Tensor& g = tp.grad(s);
                    if (tp.requires_grad(ia)) {
                      const Tensor& bv = tp.value(ib);
                      Tensor ga({g.rows(), bv.rows()});
                      as_matrix(ga).noalias() = as_matrix(g) * as_matrix(bv).transpose();
                      tp.accumulate(ia, std::move(ga));
                    }
                    if (tp.requires_grad(ib)) {
                      const Tensor& av = tp.value(ia);
                      Tensor gb({av.cols(), g.cols()});
                      as_matrix(gb).noalias() = as_matrix(av).transpose() * as_matrix(g);
                      tp.accumulate(ib, std::move(gb));
                    }
                  });
}

Var add_row_bias(Var a, Var bias) {
  Tape& t = same_tape("add_row_bias", a, bias);
  const Tensor& x = a.value();
  const Tensor& b = bias.value();
  if (x.rank() != 2 || b.rank() != 2 || b.rows() != 1 || b.cols() != x.cols()) {
    throw ShapeError("add_row_bias: cannot add " + to_string(b.shape()) + " to rows of " +
                     to_string(x.shape()));
  }
  Tensor out = x;
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) += b(0, c);
  return t.record("add_row_bias", std::move(out), {a, bias}, [](Tape& tp, std::size_t s) {
    const Tensor& g = tp.grad(s);
    tp.accumulate(tp.input(s, 0), g);
    if (tp.requires_grad(tp.input(s, 1))) {
      Tensor gb({1, g.cols()});
      as_matrix(gb) = as_matrix(g).colwise().sum();
      tp.accumulate(tp.input(s, 1), std::move(gb));
    }
  });
}

Var concat_cols(std::initializer_list<Var> parts) {
  return concat_cols(std::span<const Var>(parts.begin(), parts.size()));
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  std::vector<Tensor> values;
  values.reserve(parts.size());
  for (const Var& p : parts) values.push_back(p.value());
  Tensor out = ops::concat_cols(values);
  return parts.front().tape().record(
      "concat", std::move(out), parts, [n = parts.size()](Tape& tp, std::size_t s) {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < n; ++k) {
          const auto in = tp.input(s, k);
          const std::size_t w = tp.value(in).cols();
          if (tp.requires_grad(in)) tp.accumulate(in, ops::slice_cols(tp.grad(s), offset, offset + w));
          offset += w;
        }
      });
}

Var slice_cols(Var a, std::size_t begin, std::size_t end) {
  return a.tape().record(
      "slice", ops::slice_cols(a.value(), begin, end), {a}, [begin](Tape& tp, std::size_t s) {
        const auto in = tp.input(s, 0);
        const Tensor& g = tp.grad(s);
        Tensor ga(tp.value(in).shape());
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) ga(r, begin + c) = g(r, c);
        tp.accumulate(in, std::move(ga));
      });
}

Var sigmoid(Var a) {
  return a.tape().record("sigmoid", ops::sigmoid(a.value()), {a}, [](Tape& tp, std::size_t s) {
    tp.accumulate(tp.input(s, 0), zip_map(tp.grad(s), tp.value(s), [](double g, double y) {
                    return g * y * (1.0 - y);
                  }));
  });
}

Var tanh(Var a) {
  return a.tape().record("tanh", ops::tanh(a.value()), {a}, [](Tape& tp, std::size_t s) {
    tp.accumulate(tp.input(s, 0), zip_map(tp.grad(s), tp.value(s), [](double g, double y) {
                    return g * (1.0 - y * y);
                  }));
  });
}

Var abs(Var a) {
  return a.tape().record("abs", ops::abs(a.value()), {a}, [](Tape& tp, std::size_t s) {
    const Tensor& x = tp.value(tp.input(s, 0));
    tp.accumulate(tp.input(s, 0), zip_map(tp.grad(s), x, [](double g, double v) {
                    return v > 0 ? g : (v < 0 ? -g : 0.0);
                  }));
  });
}

Var sum(Var a) {
  return a.tape().record("sum", ops::sum(a.value()), {a}, [](Tape& tp, std::size_t s) {
    const auto in = tp.input(s, 0);
    tp.accumulate(in, Tensor(tp.value(in).shape(), tp.grad(s).item()));
  });
}

Var mean(Var a) {
  return a.tape().record("mean", ops::mean(a.value()), {a}, [](Tape& tp, std::size_t s) {
    const auto in = tp.input(s, 0);
    const double n = static_cast<double>(tp.value(in).size());
    tp.accumulate(in, Tensor(tp.value(in).shape(), tp.grad(s).item() / n));
  });
}

Var propagate(std::shared_ptr<const std::vector<Tensor>> transitions, Var x) {
  const Tensor& xv = x.value();
  if (!transitions || transitions->empty()) throw ShapeError("propagate: no transition matrix");
  const std::size_t n = transitions->front().rows();
  if (xv.rank() != 2 || n == 0 || xv.rows() % n != 0) {
    throw ShapeError("propagate: input " + to_string(xv.shape()) +
                     " is not a stack of blocks of " + std::to_string(n) + " rows");
  }
  const std::size_t blocks = xv.rows() / n;
  if (transitions->size() != 1 && transitions->size() != blocks) {
    throw ShapeError("propagate: " + std::to_string(transitions->size()) +
                     " transition matrices for " + std::to_string(blocks) + " blocks");
  }
  for (const auto& tr : *transitions) {
    if (tr.rank() != 2 || tr.rows() != n || tr.cols() != n) {
      throw ShapeError("propagate: transition " + to_string(tr.shape()) + " is not " +
                       std::to_string(n) + "x" + std::to_string(n));
    }
  }
  const std::size_t f = xv.cols();
  Tensor out(xv.shape());
  for (std::size_t b = 0; b < blocks; ++b) {
    const Tensor& tr = (*transitions)[transitions->size() == 1 ? 0 : b];
    ConstMap xb(xv.values().data() + b * n * f, n, f);
    MutMap ob(out.values().data() + b * n * f, n, f);
    ob.noalias() = as_matrix(tr) * xb;
  }
  return x.tape().record(
      "propagate", std::move(out), {x},
      [transitions = std::move(transitions), n, f, blocks](Tape& tp, std::size_t s) {
        const Tensor& g = tp.grad(s);
        Tensor gx(g.shape());
        for (std::size_t b = 0; b < blocks; ++b) {
          const Tensor& tr = (*transitions)[transitions->size() == 1 ? 0 : b];
          ConstMap gb(g.values().data() + b * n * f, n, f);
          MutMap ob(gx.values().data() + b * n * f, n, f);
          ob.noalias() = as_matrix(tr).transpose() * gb;
        }
        tp.accumulate(tp.input(s, 0), std::move(gx));
      });
}

Var block_mean_rows(Var x, std::size_t block) {
  const Tensor& xv = x.value();
  if (xv.rank() != 2 || block == 0 || xv.rows() % block != 0) {
    throw ShapeError("block_mean_rows: " + to_string(xv.shape()) +
                     " does not split into blocks of " + std::to_string(block) + " rows");
  }
  const std::size_t blocks = xv.rows() / block;
  const std::size_t f = xv.cols();
  Tensor out({blocks, f});
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t r = 0; r < block; ++r)
      for (std::size_t c = 0; c < f; ++c) out(b, c) += xv(b * block + r, c);
  for (auto& v : out.values()) v /= static_cast<double>(block);
  return x.tape().record("block_mean_rows", std::move(out), {x},
                         [block, blocks, f](Tape& tp, std::size_t s) {
                           const Tensor& g = tp.grad(s);
                           Tensor gx({blocks * block, f});
                           const double inv = 1.0 / static_cast<double>(block);
                           for (std::size_t b = 0; b < blocks; ++b)
                             for (std::size_t r = 0; r < block; ++r)
                               for (std::size_t c = 0; c < f; ++c) gx(b * block + r, c) = g(b, c) * inv;
                           tp.accumulate(tp.input(s, 0), std::move(gx));
                         });
}

Var bce_with_logits(Var logits, const Tensor& labels) {
  const Tensor& z = logits.value();
  if (z.shape() != labels.shape()) {
    throw ShapeError("bce_with_logits: logits " + to_string(z.shape()) + " vs labels " +
                     to_string(labels.shape()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double x = z[i];
    total += std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))) - labels[i] * x;
  }
  const double n = static_cast<double>(z.size());
  return logits.tape().record(
      "bce_with_logits", Tensor::scalar(total / n), {logits},
      [labels, n](Tape& tp, std::size_t s) {
        const Tensor& zv = tp.value(tp.input(s, 0));
        const Tensor p = ops::sigmoid(zv);
        const double g = tp.grad(s).item();
        Tensor gz(zv.shape());
        for (std::size_t i = 0; i < zv.size(); ++i) gz[i] = g * (p[i] - labels[i]) / n;
        tp.accumulate(tp.input(s, 0), std::move(gz));
      });
}

Var mean_abs_error(Var prediction, Var target) { return mean(abs(sub(prediction, target))); }

}  // namespace eegssl::num
