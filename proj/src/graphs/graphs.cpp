// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/graphs/graphs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "eegssl/common/error.hpp"
#include "eegssl/common/format.hpp"

namespace eegssl::graphs {

namespace {

double euclidean(const num::Tensor& pos, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t d = 0; d < pos.cols(); ++d) {
    const double diff = pos(i, d) - pos(j, d);
    s += diff * diff;
  }
  return std::sqrt(s);
}

}  // namespace

std::string_view to_string(GraphMode m) {
  return m == GraphMode::distance ? "distance" : "correlation";
}

GraphMode parse_graph_mode(std::string_view s) {
  if (s == "distance") return GraphMode::distance;
  if (s == "correlation") return GraphMode::correlation;
  throw ConfigError("unknown graph mode '" + std::string(s) + "' (expected distance|correlation)");
}

std::string_view to_string(ThresholdMode m) {
  return m == ThresholdMode::distance ? "distance" : "weight";
}

ThresholdMode parse_threshold_mode(std::string_view s) {
  if (s == "distance") return ThresholdMode::distance;
  if (s == "weight") return ThresholdMode::weight;
  throw ConfigError("unknown threshold mode '" + std::string(s) + "' (expected distance|weight)");
}

void ElectrodeLayout::validate() const {
  if (positions.rank() != 2 || positions.cols() != 3 || positions.rows() != names.size()) {
    throw ConfigError("layout: expected " + std::to_string(names.size()) +
                      " x 3 positions, got " + num::to_string(positions.shape()));
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double norm = std::sqrt(positions(i, 0) * positions(i, 0) + positions(i, 1) * positions(i, 1) +
                                  positions(i, 2) * positions(i, 2));
    if (std::abs(norm - 1.0) > 1e-6) {
      throw ConfigError("layout: electrode " + names[i] + " is not on the unit sphere (norm " +
                        format_double(norm) + ")");
    }
  }
}

std::size_t ElectrodeLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw ConfigError("layout: no electrode named " + std::string(name));
}

ElectrodeLayout standard_1020_layout() {
  // Spherical (theta, phi) in degrees; negative theta is the left hemisphere.
  struct Entry {
    const char* name;
    double theta, phi;
  };
  static constexpr Entry kEntries[] = {
      {"FP1", -92, -72}, {"FP2", 92, 72},  {"F7", -92, -36}, {"F3", -60, -51}, {"FZ", 46, 90},
      {"F4", 60, 51},    {"F8", 92, 36},   {"T3", -92, 0},   {"C3", -46, 0},   {"CZ", 0, 0},
      {"C4", 46, 0},     {"T4", 92, 0},    {"T5", -92, 36},  {"P3", -60, 51},  {"PZ", 46, -90},
      {"P4", 60, -51},   {"T6", 92, -36},  {"O1", -92, 72},  {"O2", 92, -72}};
  ElectrodeLayout layout;
  layout.positions = num::Tensor({std::size(kEntries), 3});
  std::size_t i = 0;
  for (const auto& e : kEntries) {
    const double th = e.theta * std::numbers::pi / 180.0;
    const double ph = e.phi * std::numbers::pi / 180.0;
    layout.names.emplace_back(e.name);
    layout.positions(i, 0) = std::sin(th) * std::cos(ph);
    layout.positions(i, 1) = std::sin(th) * std::sin(ph);
    layout.positions(i, 2) = std::cos(th);
    ++i;
  }
  return layout;
}

ElectrodeLayout read_layout_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open layout file " + path.string());
  std::string line;
  ElectrodeLayout layout;
  std::vector<double> coords;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("name,", 0) == 0 || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string name, x, y, z;
    if (!std::getline(ss, name, ',') || !std::getline(ss, x, ',') || !std::getline(ss, y, ',') ||
        !std::getline(ss, z, ',')) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected name,x,y,z");
    }
    layout.names.push_back(name);
    for (const auto* field : {&x, &y, &z}) {
      double v = 0.0;
      auto res = std::from_chars(field->data(), field->data() + field->size(), v);
      if (res.ec != std::errc()) {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad coordinate '" + *field + "'");
      }
      coords.push_back(v);
    }
  }
  layout.positions = num::Tensor({layout.names.size(), 3}, std::move(coords));
  layout.validate();
  return layout;
}

void write_layout_csv(const std::filesystem::path& path, const ElectrodeLayout& layout) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "name,x,y,z\n";
  for (std::size_t i = 0; i < layout.size(); ++i) {
    os << layout.names[i] << ',' << format_double(layout.positions(i, 0)) << ','
       << format_double(layout.positions(i, 1)) << ',' << format_double(layout.positions(i, 2)) << '\n';
  }
}

Transitions transitions(const num::Tensor& w) {
  if (w.rank() != 2 || w.rows() != w.cols()) {
    throw num::ShapeError("transitions: weights must be square, got " + num::to_string(w.shape()));
  }
  const std::size_t n = w.rows();
  Transitions t{num::Tensor({n, n}), num::Tensor({n, n})};
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += w(i, j);
      col += w(j, i);
    }
    for (std::size_t j = 0; j < n; ++j) {
      t.out(i, j) = row > 0.0 ? w(i, j) / row : 0.0;
      t.in(i, j) = col > 0.0 ? w(j, i) / col : 0.0;
    }
  }
  return t;
}

Graph::Graph(num::Tensor weights, GraphMode mode)
    : weights_(std::move(weights)), mode_(mode), transitions_(transitions(weights_)) {
  for (double v : weights_.values()) {
    if (!(v >= 0.0)) throw ConfigError("graph weights must be non-negative and finite");
  }
}

Graph build_distance_graph(const ElectrodeLayout& layout, double kappa,
                           ThresholdMode threshold_mode) {
  const std::size_t n = layout.size();
  if (n < 2) throw ConfigError("build_distance_graph: need at least 2 electrodes");
  layout.validate();

  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dists.push_back(euclidean(layout.positions, i, j));
  const double mean = std::accumulate(dists.begin(), dists.end(), 0.0) / static_cast<double>(dists.size());
  double var = 0.0;
  for (double d : dists) var += (d - mean) * (d - mean);
  var /= static_cast<double>(dists.size());
  const double sigma = std::sqrt(var);
  if (!(sigma > 0.0)) {
    throw ConfigError("build_distance_graph: pairwise distances have zero standard deviation");
  }

  num::Tensor w({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double d = i == j ? 0.0 : euclidean(layout.positions, i, j);
      const double k = std::exp(-(d * d) / (sigma * sigma));
      const bool keep = threshold_mode == ThresholdMode::distance ? d <= kappa : k >= kappa;
      w(i, j) = w(j, i) = keep ? k : 0.0;
    }
  }
  return Graph(std::move(w), GraphMode::distance);
}

num::Tensor correlation_weights(const num::Tensor& window,
                                const std::vector<std::string>& channel_names) {
  if (window.rank() != 2) throw num::ShapeError("correlation_weights: expected channels x timepoints");
  const std::size_t n = window.rows();
  const std::size_t len = window.cols();

  std::vector<std::vector<double>> centered(n, std::vector<double>(len));
  std::vector<double> norms(n);
  for (std::size_t c = 0; c < n; ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < len; ++t) mean += window(c, t);
    mean /= static_cast<double>(len);
    double ss = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      centered[c][t] = window(c, t) - mean;
      ss += centered[c][t] * centered[c][t];
    }
    norms[c] = std::sqrt(ss);
    if (!(norms[c] > 0.0)) {
      const std::string name = c < channel_names.size() ? channel_names[c] : "#" + std::to_string(c);
      throw ConfigError("correlation graph: channel " + name + " is constant");
    }
  }

  num::Tensor w({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < len; ++t) dot += centered[i][t] * centered[j][t];
      const double r = std::min(1.0, std::abs(dot) / (norms[i] * norms[j]));
      w(i, j) = w(j, i) = r;
    }
  }
  return w;
}

num::Tensor prune_top_k(const num::Tensor& weights, std::size_t k) {
  const std::size_t n = weights.rows();
  if (k >= n) {
    throw ConfigError("prune_top_k: k=" + std::to_string(k) + " must be below the node count " +
                      std::to_string(n));
  }
  num::Tensor out({n, n});
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) {
    idx.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) idx.push_back(j);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return weights(i, a) > weights(i, b); });
    for (std::size_t r = 0; r < k; ++r) out(i, idx[r]) = weights(i, idx[r]);
  }
  return out;
}

Graph build_correlation_graph(const num::Tensor& window, std::size_t k_neighbors,
                              const std::vector<std::string>& channel_names) {
  return Graph(prune_top_k(correlation_weights(window, channel_names), k_neighbors),
               GraphMode::correlation);
}

void write_matrix_csv(const std::filesystem::path& path, const num::Tensor& m) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

}  // namespace eegssl::graphs
