// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "eegssl/common/random.hpp"
#include "eegssl/graphs/graphs.hpp"
#include "eegssl/numkernel/param_store.hpp"
#include "eegssl/numkernel/tape.hpp"
#include "eegssl/signal/signal.hpp"

namespace eegssl::model {

struct DcgruConfig {
  int num_layers = 2;
  int hidden_dim = 16;
  int diffusion_steps = 2;  // K
  int input_features = 25;  // P
  int nodes = 19;           // N

  void validate() const;
  bool operator==(const DcgruConfig&) const = default;
};

void to_json(nlohmann::json& j, const DcgruConfig& c);
void from_json(const nlohmann::json& j, DcgruConfig& c);

/// Field-by-field differences, e.g. {"hidden_dim: 16 vs 8"}.
std::vector<std::string> config_differences(const DcgruConfig& a, const DcgruConfig& b);

/// Transition matrices for a batch: either one pair shared by every sample
/// or one pair per sample.
struct GraphSupports {
  std::shared_ptr<const std::vector<num::Tensor>> out;
  std::shared_ptr<const std::vector<num::Tensor>> in;

  static GraphSupports shared(const graphs::Graph& g);
  static GraphSupports per_sample(std::span<const graphs::Graph* const> graphs);
  std::size_t nodes() const { return out->front().rows(); }
};

/// T steps, each the [B*N, P] row-stack of B samples.
struct SequenceBatch {
  std::vector<num::Tensor> steps;
  std::size_t batch = 0;
};

SequenceBatch make_batch(std::span<const signal::FeatureTensor* const> samples);
SequenceBatch make_batch(const signal::FeatureTensor& sample);

/// Parameter names with shapes, in name order. Prefixes: encoder., decoder.,
/// classifier.
std::vector<std::pair<std::string, num::Shape>> parameter_shapes(const DcgruConfig& cfg);

/// Diffusion weights are stored as a [2K*F, Q] matrix. Row (2k + d)*F + p,
/// column q holds theta_{k,d} of the filter mapping input feature p to
/// output feature q; d = 0 is the out-transition direction, d = 1 the
/// in-transition direction.
std::size_t diffusion_row(int k, int direction, std::size_t in_features, std::size_t p);

/// Sum over k < K and both directions of T_d^k X W_{k,d}, plus a bias row.
/// Powers are applied iteratively to X, never formed as matrices.
num::Var diffusion_conv(num::Var x, const GraphSupports& g, num::Var weight, num::Var bias,
                        int diffusion_steps);

/// r = sig(DC_r[x|h]), u = sig(DC_u[x|h]), c = tanh(DC_c[x|r*h]),
/// h' = u*h + (1-u)*c. `prefix` is e.g. "encoder.layer0".
num::Var dcgru_cell(num::Tape& tape, const num::ParamStore& params, const std::string& prefix,
                    num::Var x, num::Var h, const GraphSupports& g, const DcgruConfig& cfg);

/// Final hidden state per layer after running the stacked encoder over the
/// sequence from a zero state.
std::vector<num::Var> encode(num::Tape& tape, const num::ParamStore& params,
                             const SequenceBatch& inputs, const GraphSupports& g,
                             const DcgruConfig& cfg);

/// Decoder seeded with the encoder state. Step 0 input is zero; step t > 0
/// is fed the clean target at t-1 with probability `teacher_forcing`
/// (one draw per step), else the previous prediction. Returns one [B*N, P]
/// prediction per step.
std::vector<num::Var> decode_denoise(num::Tape& tape, const num::ParamStore& params,
                                     const std::vector<num::Var>& encoder_state,
                                     const SequenceBatch& target, const GraphSupports& g,
                                     const DcgruConfig& cfg, double teacher_forcing, Rng& rng);

/// Seizure logit per sample: top encoder layer, node mean, linear layer.
num::Var classify_logits(num::Tape& tape, const num::ParamStore& params,
                         const SequenceBatch& inputs, const GraphSupports& g,
                         const DcgruConfig& cfg);

// Value-level single-sample entry points.

std::vector<num::Tensor> encode(const signal::FeatureTensor& sequence, const graphs::Graph& g,
                                const num::ParamStore& params, const DcgruConfig& cfg);

signal::FeatureTensor decode_denoise(const std::vector<num::Tensor>& encoder_state,
                                     const signal::FeatureTensor& target, const graphs::Graph& g,
                                     const num::ParamStore& params, const DcgruConfig& cfg,
                                     double teacher_forcing, std::uint64_t seed);

double classify(const signal::FeatureTensor& sequence, const graphs::Graph& g,
                const num::ParamStore& params, const DcgruConfig& cfg);

}  // namespace eegssl::model
