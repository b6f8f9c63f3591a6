// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eegssl/numkernel/tensor.hpp"

namespace eegssl::graphs {

enum class GraphMode { distance, correlation };
enum class ThresholdMode { distance, weight };

std::string_view to_string(GraphMode m);
GraphMode parse_graph_mode(std::string_view s);
std::string_view to_string(ThresholdMode m);
ThresholdMode parse_threshold_mode(std::string_view s);

/// Electrode names with unit-sphere positions (N x 3).
struct ElectrodeLayout {
  std::vector<std::string> names;
  num::Tensor positions;

  std::size_t size() const { return names.size(); }
  /// Throws unless names and positions agree and every norm is 1 +- 1e-6.
  void validate() const;
  std::size_t index_of(std::string_view name) const;
};

/// Idealized spherical 10-20 positions for the standard 19 channels.
ElectrodeLayout standard_1020_layout();

// Layout file: CSV "name,x,y,z" with a header row.
ElectrodeLayout read_layout_csv(const std::filesystem::path& path);
void write_layout_csv(const std::filesystem::path& path, const ElectrodeLayout& layout);

struct Transitions {
  num::Tensor out;  // D_O^{-1} W
  num::Tensor in;   // D_I^{-1} W^T
};

/// Random-walk transition matrices. Zero-degree rows stay zero.
Transitions transitions(const num::Tensor& weights);

/// Weighted adjacency with its derived transition matrices.
class Graph {
 public:
  Graph() = default;
  Graph(num::Tensor weights, GraphMode mode);

  const num::Tensor& weights() const { return weights_; }
  GraphMode mode() const { return mode_; }
  const num::Tensor& out_transition() const { return transitions_.out; }
  const num::Tensor& in_transition() const { return transitions_.in; }
  std::size_t nodes() const { return weights_.rows(); }

 private:
  num::Tensor weights_;
  GraphMode mode_ = GraphMode::distance;
  Transitions transitions_;
};

/// Gaussian-kernel graph over electrode distances. sigma is the standard
/// deviation of the N(N-1)/2 pairwise distances. An edge is kept when
/// dist <= kappa (ThresholdMode::distance) or when its kernel weight is
/// >= kappa (ThresholdMode::weight).
Graph build_distance_graph(const ElectrodeLayout& layout, double kappa = 0.9,
                           ThresholdMode threshold_mode = ThresholdMode::distance);

/// |zero-lag Pearson correlation| between channels of a channels x timepoints
/// matrix; diagonal zero. Throws naming any constant channel.
num::Tensor correlation_weights(const num::Tensor& window,
                                const std::vector<std::string>& channel_names = {});

/// Keeps the k largest off-diagonal weights in each row (ties to the lower
/// column index) and zeroes the rest.
num::Tensor prune_top_k(const num::Tensor& weights, std::size_t k);

Graph build_correlation_graph(const num::Tensor& window, std::size_t k_neighbors = 3,
                              const std::vector<std::string>& channel_names = {});

void write_matrix_csv(const std::filesystem::path& path, const num::Tensor& m);

}  // namespace eegssl::graphs
