// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/numkernel/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace eegssl::num {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) +
                     " vs " + to_string(b.shape()));
  }
}

void require_rank2(const char* op, const Tensor& a) {
  if (a.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected a matrix, got shape " +
                     to_string(a.shape()));
  }
}

template <typename F>
Tensor map(const Tensor& a, F f) {
  Tensor out(a.shape());
  auto src = a.values();
  auto dst = out.values();
  std::transform(src.begin(), src.end(), dst.begin(), f);
  return out;
}

template <typename F>
Tensor zip(const char* op, const Tensor& a, const Tensor& b, F f) {
  require_same_shape(op, a, b);
  Tensor out(a.shape());
  auto x = a.values();
  auto y = b.values();
  auto dst = out.values();
  std::transform(x.begin(), x.end(), y.begin(), dst.begin(), f);
  return out;
}

}  // namespace

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (data_.size() != element_count(shape_)) {
    throw ShapeError("Tensor: shape " + to_string(shape_) + " needs " +
                     std::to_string(element_count(shape_)) + " values, got " +
                     std::to_string(data_.size()));
  }
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, std::vector<double>{value}); }

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::initializer_list<double> values) {
  return Tensor({rows, cols}, std::vector<double>(values));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor out({n, n});
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

std::size_t Tensor::rows() const {
  require_rank2("rows", *this);
  return shape_[0];
}

std::size_t Tensor::cols() const {
  require_rank2("cols", *this);
  return shape_[1];
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw ShapeError("item: tensor of shape " + to_string(shape_) + " is not a scalar");
  }
  return data_[0];
}

Tensor Tensor::reshaped(Shape shape) const {
  if (element_count(shape) != data_.size()) {
    throw ShapeError("reshape: cannot view " + to_string(shape_) + " as " + to_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

bool all_finite(const Tensor& t) {
  auto v = t.values();
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_same_shape("max_abs_diff", a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

namespace ops {

Tensor add(const Tensor& a, const Tensor& b) {
  return zip("add", a, b, std::plus<>());
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return zip("sub", a, b, std::minus<>());
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return zip("mul", a, b, std::multiplies<>());
}

Tensor scale(const Tensor& a, double s) {
  return map(a, [s](double x) { return s * x; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2("matmul", a);
  require_rank2("matmul", b);
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ " + to_string(a.shape()) + " vs " +
                     to_string(b.shape()));
  }
  Tensor out({a.rows(), b.cols()});
  Eigen::Map<const RowMat> ma(a.values().data(), a.rows(), a.cols());
  Eigen::Map<const RowMat> mb(b.values().data(), b.rows(), b.cols());
  Eigen::Map<RowMat> mo(out.values().data(), a.rows(), b.cols());
  mo.noalias() = ma * mb;
  return out;
}

Tensor transpose(const Tensor& a) {
  require_rank2("transpose", a);
  Tensor out({a.cols(), a.rows()});
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
  return out;
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    require_rank2("concat", p);
    if (p.rows() != rows) {
      throw ShapeError("concat: row counts differ " + to_string(parts.front().shape()) +
                       " vs " + to_string(p.shape()));
    }
    cols += p.cols();
  }
  Tensor out({rows, cols});
  for (std::size_t r = 0; r < rows; ++r) {
    double* dst = &out(r, 0);
    for (const auto& p : parts) {
      const double* src = p.values().data() + r * p.cols();
      dst = std::copy(src, src + p.cols(), dst);
    }
  }
  return out;
}

Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end) {
  require_rank2("slice", a);
  if (begin > end || end > a.cols()) {
    throw ShapeError("slice: column range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") outside " + to_string(a.shape()));
  }
  Tensor out({a.rows(), end - begin});
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = begin; c < end; ++c) out(r, c - begin) = a(r, c);
  return out;
}

Tensor sigmoid(const Tensor& a) {
  return map(a, [](double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
}

Tensor tanh(const Tensor& a) {
  return map(a, [](double x) { return std::tanh(x); });
}

Tensor abs(const Tensor& a) {
  return map(a, [](double x) { return std::abs(x); });
}

Tensor sum(const Tensor& a) {
  auto v = a.values();
  return Tensor::scalar(std::accumulate(v.begin(), v.end(), 0.0));
}

Tensor mean(const Tensor& a) {
  if (a.size() == 0) throw ShapeError("mean: empty tensor");
  return Tensor::scalar(sum(a).item() / static_cast<double>(a.size()));
}

double mean_abs(const Tensor& a) { return mean(abs(a)).item(); }

}  // namespace ops

}  // namespace eegssl::num
