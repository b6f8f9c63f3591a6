// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/model/model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "eegssl/common/error.hpp"

namespace eegssl::model {

namespace {

constexpr const char* kGates[] = {"candidate", "reset", "update"};

std::size_t layer_input_dim(const DcgruConfig& cfg, int layer) {
  return static_cast<std::size_t>(layer == 0 ? cfg.input_features : cfg.hidden_dim);
}

std::string layer_prefix(const std::string& stack, int layer) {
  return stack + ".layer" + std::to_string(layer);
}

num::Var gate(num::Tape& tape, const num::ParamStore& params, const std::string& prefix,
              const char* name, num::Var input, const GraphSupports& g, int k) {
  const std::string base = prefix + "." + name;
  return diffusion_conv(input, g, tape.param(params, base + ".weight"),
                        tape.param(params, base + ".bias"), k);
}

}  // namespace

void DcgruConfig::validate() const {
  if (num_layers <= 0 || hidden_dim <= 0 || diffusion_steps <= 0 || input_features <= 0 ||
      nodes <= 0) {
    throw ConfigError("model config: num_layers, hidden_dim, diffusion_steps, input_features and "
                      "nodes must all be positive");
  }
}

void to_json(nlohmann::json& j, const DcgruConfig& c) {
  j = nlohmann::json{{"num_layers", c.num_layers},
                     {"hidden_dim", c.hidden_dim},
                     {"diffusion_steps", c.diffusion_steps},
                     {"input_features", c.input_features},
                     {"nodes", c.nodes}};
}

void from_json(const nlohmann::json& j, DcgruConfig& c) {
  if (j.contains("num_layers")) j.at("num_layers").get_to(c.num_layers);
  if (j.contains("hidden_dim")) j.at("hidden_dim").get_to(c.hidden_dim);
  if (j.contains("diffusion_steps")) j.at("diffusion_steps").get_to(c.diffusion_steps);
  if (j.contains("input_features")) j.at("input_features").get_to(c.input_features);
  if (j.contains("nodes")) j.at("nodes").get_to(c.nodes);
}

std::vector<std::string> config_differences(const DcgruConfig& a, const DcgruConfig& b) {
  std::vector<std::string> out;
  auto cmp = [&](const char* name, int x, int y) {
    if (x != y) out.push_back(std::string(name) + ": " + std::to_string(x) + " vs " + std::to_string(y));
  };
  cmp("num_layers", a.num_layers, b.num_layers);
  cmp("hidden_dim", a.hidden_dim, b.hidden_dim);
  cmp("diffusion_steps", a.diffusion_steps, b.diffusion_steps);
  cmp("input_features", a.input_features, b.input_features);
  cmp("nodes", a.nodes, b.nodes);
  return out;
}

GraphSupports GraphSupports::shared(const graphs::Graph& g) {
  return {std::make_shared<const std::vector<num::Tensor>>(1, g.out_transition()),
          std::make_shared<const std::vector<num::Tensor>>(1, g.in_transition())};
}

GraphSupports GraphSupports::per_sample(std::span<const graphs::Graph* const> graphs) {
  if (graphs.empty()) throw ConfigError("GraphSupports: no graphs");
  std::vector<num::Tensor> out, in;
  out.reserve(graphs.size());
  in.reserve(graphs.size());
  for (const auto* g : graphs) {
    out.push_back(g->out_transition());
    in.push_back(g->in_transition());
  }
  return {std::make_shared<const std::vector<num::Tensor>>(std::move(out)),
          std::make_shared<const std::vector<num::Tensor>>(std::move(in))};
}

SequenceBatch make_batch(std::span<const signal::FeatureTensor* const> samples) {
  if (samples.empty()) throw ConfigError("make_batch: empty batch");
  const auto& shape = samples.front()->values.shape();
  for (const auto* s : samples) {
    if (s->values.shape() != shape) {
      throw num::ShapeError("make_batch: feature shapes differ " + num::to_string(shape) + " vs " +
                            num::to_string(s->values.shape()));
    }
  }
  const std::size_t steps = shape[0], n = shape[1], p = shape[2];
  SequenceBatch batch;
  batch.batch = samples.size();
  batch.steps.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    num::Tensor x({samples.size() * n, p});
    for (std::size_t b = 0; b < samples.size(); ++b) {
      const double* src = samples[b]->values.values().data() + t * n * p;
      std::copy(src, src + n * p, x.values().data() + b * n * p);
    }
    batch.steps.push_back(std::move(x));
  }
  return batch;
}

SequenceBatch make_batch(const signal::FeatureTensor& sample) {
  const signal::FeatureTensor* one[] = {&sample};
  return make_batch(one);
}

std::vector<std::pair<std::string, num::Shape>> parameter_shapes(const DcgruConfig& cfg) {
  cfg.validate();
  const auto h = static_cast<std::size_t>(cfg.hidden_dim);
  const auto k2 = static_cast<std::size_t>(2 * cfg.diffusion_steps);
  std::vector<std::pair<std::string, num::Shape>> out;
  for (const char* stack : {"encoder", "decoder"}) {
    for (int l = 0; l < cfg.num_layers; ++l) {
      const std::size_t f = layer_input_dim(cfg, l) + h;
      for (const char* g : kGates) {
        const std::string base = layer_prefix(stack, l) + "." + g;
        out.emplace_back(base + ".bias", num::Shape{1, h});
        out.emplace_back(base + ".weight", num::Shape{k2 * f, h});
      }
    }
  }
  const auto p = static_cast<std::size_t>(cfg.input_features);
  out.emplace_back("decoder.projection.bias", num::Shape{1, p});
  out.emplace_back("decoder.projection.weight", num::Shape{h, p});
  out.emplace_back("classifier.fc.bias", num::Shape{1, 1});
  out.emplace_back("classifier.fc.weight", num::Shape{h, 1});
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t diffusion_row(int k, int direction, std::size_t in_features, std::size_t p) {
  return static_cast<std::size_t>(2 * k + direction) * in_features + p;
}

num::Var diffusion_conv(num::Var x, const GraphSupports& g, num::Var weight, num::Var bias,
                        int diffusion_steps) {
  if (diffusion_steps < 1) throw ConfigError("diffusion_conv: K must be at least 1");
  const std::size_t f = x.value().cols();
  const auto expected_rows = static_cast<std::size_t>(2 * diffusion_steps) * f;
  if (weight.value().rank() != 2 || weight.value().rows() != expected_rows) {
    throw num::ShapeError("diffusion_conv: weight " + num::to_string(weight.value().shape()) +
                          " does not match K=" + std::to_string(diffusion_steps) + " and " +
                          std::to_string(f) + " input features");
  }
  std::vector<num::Var> terms;
  terms.reserve(expected_rows / f);
  num::Var fwd = x;
  num::Var bwd = x;
  for (int k = 0; k < diffusion_steps; ++k) {
    if (k > 0) {
      fwd = num::propagate(g.out, fwd);
      bwd = num::propagate(g.in, bwd);
    }
    terms.push_back(fwd);
    terms.push_back(bwd);
  }
  return num::add_row_bias(num::matmul(num::concat_cols(terms), weight), bias);
}

num::Var dcgru_cell(num::Tape& tape, const num::ParamStore& params, const std::string& prefix,
                    num::Var x, num::Var h, const GraphSupports& g, const DcgruConfig& cfg) {
  const int k = cfg.diffusion_steps;
  const num::Var xh = num::concat_cols({x, h});
  const num::Var r = num::sigmoid(gate(tape, params, prefix, "reset", xh, g, k));
  const num::Var u = num::sigmoid(gate(tape, params, prefix, "update", xh, g, k));
  const num::Var xrh = num::concat_cols({x, num::mul(r, h)});
  const num::Var c = num::tanh(gate(tape, params, prefix, "candidate", xrh, g, k));
  // u*h + (1-u)*c
  return num::add(num::mul(u, h), num::mul(num::affine(u, -1.0, 1.0), c));
}

std::vector<num::Var> encode(num::Tape& tape, const num::ParamStore& params,
                             const SequenceBatch& inputs, const GraphSupports& g,
                             const DcgruConfig& cfg) {
  if (inputs.steps.empty()) throw ConfigError("encode: sequence has no steps");
  const std::size_t rows = inputs.steps.front().rows();
  std::vector<num::Var> state;
  for (int l = 0; l < cfg.num_layers; ++l) {
    state.push_back(tape.constant(num::Tensor({rows, static_cast<std::size_t>(cfg.hidden_dim)})));
  }
  for (const auto& step : inputs.steps) {
    num::Var x = tape.constant(step);
    for (int l = 0; l < cfg.num_layers; ++l) {
      state[l] = dcgru_cell(tape, params, layer_prefix("encoder", l), x, state[l], g, cfg);
      x = state[l];
    }
  }
  return state;
}

std::vector<num::Var> decode_denoise(num::Tape& tape, const num::ParamStore& params,
                                     const std::vector<num::Var>& encoder_state,
                                     const SequenceBatch& target, const GraphSupports& g,
                                     const DcgruConfig& cfg, double teacher_forcing, Rng& rng) {
  if (!(teacher_forcing >= 0.0 && teacher_forcing <= 1.0)) {
    throw ConfigError("decode_denoise: teacher forcing probability must lie in [0, 1]");
  }
  if (encoder_state.size() != static_cast<std::size_t>(cfg.num_layers)) {
    throw ConfigError("decode_denoise: encoder state has " + std::to_string(encoder_state.size()) +
                      " layers, config has " + std::to_string(cfg.num_layers));
  }
  std::vector<num::Var> state = encoder_state;
  const num::Var w = tape.param(params, "decoder.projection.weight");
  const num::Var b = tape.param(params, "decoder.projection.bias");

  std::vector<num::Var> outputs;
  outputs.reserve(target.steps.size());
  num::Var input = tape.constant(num::Tensor(target.steps.front().shape()));
  for (std::size_t t = 0; t < target.steps.size(); ++t) {
    num::Var x = input;
    for (int l = 0; l < cfg.num_layers; ++l) {
      state[l] = dcgru_cell(tape, params, layer_prefix("decoder", l), x, state[l], g, cfg);
      x = state[l];
    }
    outputs.push_back(num::add_row_bias(num::matmul(x, w), b));
    if (t + 1 < target.steps.size()) {
      input = rng.bernoulli(teacher_forcing) ? tape.constant(target.steps[t]) : outputs.back();
    }
  }
  return outputs;
}

num::Var classify_logits(num::Tape& tape, const num::ParamStore& params,
                         const SequenceBatch& inputs, const GraphSupports& g,
                         const DcgruConfig& cfg) {
  const auto state = encode(tape, params, inputs, g, cfg);
  const num::Var pooled = num::block_mean_rows(state.back(), static_cast<std::size_t>(cfg.nodes));
  return num::add_row_bias(num::matmul(pooled, tape.param(params, "classifier.fc.weight")),
                           tape.param(params, "classifier.fc.bias"));
}

std::vector<num::Tensor> encode(const signal::FeatureTensor& sequence, const graphs::Graph& g,
                                const num::ParamStore& params, const DcgruConfig& cfg) {
  num::Tape tape;
  const auto state = encode(tape, params, make_batch(sequence), GraphSupports::shared(g), cfg);
  std::vector<num::Tensor> out;
  for (const auto& v : state) out.push_back(v.value());
  return out;
}

signal::FeatureTensor decode_denoise(const std::vector<num::Tensor>& encoder_state,
                                     const signal::FeatureTensor& target, const graphs::Graph& g,
                                     const num::ParamStore& params, const DcgruConfig& cfg,
                                     double teacher_forcing, std::uint64_t seed) {
  num::Tape tape;
  std::vector<num::Var> state;
  for (const auto& s : encoder_state) state.push_back(tape.constant(s));
  Rng rng(seed);
  const auto preds = decode_denoise(tape, params, state, make_batch(target),
                                    GraphSupports::shared(g), cfg, teacher_forcing, rng);
  signal::FeatureTensor out;
  out.provenance = target.provenance;
  out.values = num::Tensor(target.values.shape());
  const std::size_t block = target.nodes() * target.features();
  for (std::size_t t = 0; t < preds.size(); ++t) {
    std::copy_n(preds[t].value().values().data(), block, out.values.values().data() + t * block);
  }
  return out;
}

double classify(const signal::FeatureTensor& sequence, const graphs::Graph& g,
                const num::ParamStore& params, const DcgruConfig& cfg) {
  num::Tape tape;
  const num::Var logit =
      classify_logits(tape, params, make_batch(sequence), GraphSupports::shared(g), cfg);
  return num::ops::sigmoid(logit.value()).item();
}

}  // namespace eegssl::model
