// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "eegssl/common/error.hpp"
#include "eegssl/common/random.hpp"
#include "eegssl/numkernel/tape.hpp"

namespace eegssl::train {

namespace {

bool has_prefix(std::string_view name, std::string_view prefix) {
  return name.substr(0, prefix.size()) == prefix;
}

bool is_bias(std::string_view name) {
  return name.size() >= 5 && name.substr(name.size() - 5) == ".bias";
}

// Fisher-Yates with the library Rng so orders match across platforms.
std::vector<std::size_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::vector<std::vector<std::size_t>> batches_of(const std::vector<std::size_t>& order,
                                                 int batch_size) {
  std::vector<std::vector<std::size_t>> out;
  const auto b = static_cast<std::size_t>(batch_size);
  for (std::size_t i = 0; i < order.size(); i += b) {
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + b)));
  }
  return out;
}

model::SequenceBatch gather(const std::vector<signal::FeatureTensor>& features,
                            std::span<const std::size_t> idx) {
  std::vector<const signal::FeatureTensor*> ptrs;
  ptrs.reserve(idx.size());
  for (std::size_t i : idx) ptrs.push_back(&features[i]);
  return model::make_batch(ptrs);
}

num::Tensor label_column(const std::vector<int>& labels, std::span<const std::size_t> idx) {
  num::Tensor y({idx.size(), 1});
  for (std::size_t i = 0; i < idx.size(); ++i) y[i] = labels[idx[i]] != 0 ? 1.0 : 0.0;
  return y;
}

std::string where(int epoch, std::size_t batch) {
  return "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch);
}

void check_binary_classes(const std::vector<int>& labels, const std::string& what) {
  const bool pos = std::any_of(labels.begin(), labels.end(), [](int l) { return l != 0; });
  const bool neg = std::any_of(labels.begin(), labels.end(), [](int l) { return l == 0; });
  if (!pos || !neg) throw ConfigError(what + " must contain both classes");
}

}  // namespace

num::Tensor glorot_uniform(const num::Shape& shape, std::uint64_t seed) {
  if (shape.size() != 2) throw num::ShapeError("glorot_uniform: expected a matrix shape");
  num::Tensor t(shape);
  const double limit = std::sqrt(6.0 / static_cast<double>(shape[0] + shape[1]));
  Rng rng(seed);
  for (auto& v : t.values()) v = rng.uniform(-limit, limit);
  return t;
}

num::ParamStore init_params(const model::DcgruConfig& cfg, std::uint64_t seed) {
  num::ParamStore store;
  for (const auto& [name, shape] : model::parameter_shapes(cfg)) {
    store.add(name, is_bias(name) ? num::Tensor(shape) : glorot_uniform(shape, derive_seed(seed, name)));
  }
  return store;
}

num::ParamStore select_params(const num::ParamStore& params,
                              std::initializer_list<std::string_view> prefixes) {
  num::ParamStore out;
  for (const auto& [name, value] : params) {
    if (std::any_of(prefixes.begin(), prefixes.end(),
                    [&](std::string_view p) { return has_prefix(name, p); })) {
      out.add(name, value);
    }
  }
  return out;
}

void Adam::step(num::ParamStore& params, const num::GradMap& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (const auto& [name, g] : grads) {
    num::Tensor& p = params.mutable_value(name);
    auto [mit, m_new] = m_.try_emplace(name, g.shape());
    auto [vit, v_new] = v_.try_emplace(name, g.shape());
    auto m = mit->second.values();
    auto v = vit->second.values();
    auto w = p.values();
    const auto gv = g.values();
    for (std::size_t i = 0; i < gv.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * gv[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * gv[i] * gv[i];
      w[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

GraphSet::GraphSet(graphs::Graph shared)
    : shared_(std::move(shared)), shared_supports_(model::GraphSupports::shared(shared_)) {}

GraphSet::GraphSet(std::vector<graphs::Graph> per_sample) : per_sample_(std::move(per_sample)) {
  if (per_sample_.empty()) throw ConfigError("GraphSet: no graphs");
}

const graphs::Graph& GraphSet::at(std::size_t sample) const {
  return is_shared() ? shared_ : per_sample_.at(sample);
}

model::GraphSupports GraphSet::supports(std::span<const std::size_t> samples) const {
  if (is_shared()) {
    if (!shared_supports_.out) throw ConfigError("GraphSet: empty");
    return shared_supports_;
  }
  std::vector<const graphs::Graph*> ptrs;
  ptrs.reserve(samples.size());
  for (std::size_t i : samples) ptrs.push_back(&per_sample_.at(i));
  return model::GraphSupports::per_sample(ptrs);
}

GraphSet build_graphs(const TrainConfig& cfg, std::span<const signal::SignalWindow> windows,
                      const graphs::ElectrodeLayout& layout) {
  if (cfg.graph_mode == graphs::GraphMode::distance) {
    if (layout.size() != static_cast<std::size_t>(cfg.model.nodes)) {
      throw ConfigError("layout has " + std::to_string(layout.size()) + " electrodes, model has " +
                        std::to_string(cfg.model.nodes) + " nodes");
    }
    return GraphSet(graphs::build_distance_graph(layout, cfg.kappa, cfg.threshold_mode));
  }
  std::vector<graphs::Graph> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    out.push_back(graphs::build_correlation_graph(
        w.matrix, static_cast<std::size_t>(cfg.k_neighbors), layout.names));
  }
  return GraphSet(std::move(out));
}

PretrainResult pretrain(std::span<const pretext::PretextPair> pairs, const GraphSet& graphs,
                        const TrainConfig& cfg, const num::ParamStore* initial,
                        const EpochCallback& on_epoch) {
  cfg.validate();
  if (pairs.empty()) throw ConfigError("pretrain: no pretext pairs");
  if (!graphs.is_shared() && graphs.size() != pairs.size()) {
    throw ConfigError("pretrain: " + std::to_string(graphs.size()) + " graphs for " +
                      std::to_string(pairs.size()) + " pairs");
  }
  const auto steps = static_cast<std::size_t>(cfg.feature_steps);
  std::vector<signal::FeatureTensor> inputs, targets;
  inputs.reserve(pairs.size());
  targets.reserve(pairs.size());
  for (const auto& p : pairs) {
    inputs.push_back(signal::featurize(p.corrupted, steps));
    targets.push_back(signal::featurize(p.clean, steps));
  }

  num::ParamStore params = initial != nullptr
                               ? select_params(*initial, {"encoder.", "decoder."})
                               : select_params(init_params(cfg.model, cfg.seed),
                                               {"encoder.", "decoder."});
  Adam adam(cfg.learning_rate);
  Rng shuffle_rng(derive_seed(cfg.seed, "pretrain.shuffle"));
  std::uint64_t global_step = 0;

  PretrainResult result;
  for (int epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
    const auto batches = batches_of(shuffled(pairs.size(), shuffle_rng), cfg.batch_size);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& idx = batches[b];
      const double tf = cfg.scheduled_sampling.probability(global_step);
      Rng tf_rng(derive_seed(cfg.seed, global_step ^ 0x7465616368657266ULL));
      num::Tape tape;
      double loss_value = 0.0;
      num::GradMap grads;
      try {
        const auto g = graphs.supports(idx);
        const auto x = gather(inputs, idx);
        const auto y = gather(targets, idx);
        const auto state = model::encode(tape, params, x, g, cfg.model);
        const auto preds = model::decode_denoise(tape, params, state, y, g, cfg.model, tf, tf_rng);
        num::Var loss;
        for (std::size_t t = 0; t < preds.size(); ++t) {
          const num::Var term = num::mean_abs_error(preds[t], tape.constant(y.steps[t]));
          loss = t == 0 ? term : num::add(loss, term);
        }
        loss = num::scale(loss, 1.0 / static_cast<double>(preds.size()));
        loss_value = loss.value().item();
        if (!std::isfinite(loss_value)) throw num::NonFiniteError("loss is " + std::to_string(loss_value));
        grads = tape.backward(loss, params);
      } catch (const num::NonFiniteError& e) {
        throw num::NonFiniteError("pretrain: non-finite value at " + where(epoch, b) + ": " + e.what());
      }
      adam.step(params, grads);
      loss_sum += loss_value * static_cast<double>(idx.size());
      ++global_step;
    }
    const double epoch_loss = loss_sum / static_cast<double>(pairs.size());
    result.epoch_loss.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }

  result.checkpoint.config = cfg;
  result.checkpoint.params = std::move(params);
  result.checkpoint.epoch = cfg.pretrain_epochs;
  result.checkpoint.rng_state = shuffle_rng.state();
  result.checkpoint.metadata = {{"stage", "pretrain"},
                                {"loss_curve", result.epoch_loss},
                                {"optimizer_steps", adam.steps()}};
  return result;
}

num::ParamStore transfer_weights(const Checkpoint& pretrained, const model::DcgruConfig& cfg,
                                 std::uint64_t seed) {
  model::DcgruConfig source;
  try {
    source = pretrained.config.at("model").get<model::DcgruConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("transfer_weights: checkpoint has no model config: ") + e.what());
  }
  const auto diffs = model::config_differences(source, cfg);
  if (!diffs.empty()) {
    std::string msg = "transfer_weights: encoder architectures differ:";
    for (const auto& d : diffs) msg += " " + d + ";";
    msg.pop_back();
    throw ConfigError(msg);
  }
  num::ParamStore out = select_params(init_params(cfg, seed), {"classifier."});
  for (const auto& [name, shape] : model::parameter_shapes(cfg)) {
    if (!has_prefix(name, "encoder.")) continue;
    if (!pretrained.params.contains(name)) {
      throw ConfigError("transfer_weights: checkpoint lacks " + name);
    }
    const auto& v = pretrained.params.get(name);
    if (v.shape() != shape) throw ConfigError("transfer_weights: shape mismatch for " + name);
    out.add(name, v);
  }
  return out;
}

num::ParamStore fresh_classifier_weights(const model::DcgruConfig& cfg, std::uint64_t seed) {
  return select_params(init_params(cfg, seed), {"encoder.", "classifier."});
}

std::vector<double> predict(const LabeledSet& set, const num::ParamStore& weights,
                            const model::DcgruConfig& cfg, int batch_size) {
  std::vector<double> out;
  out.reserve(set.size());
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), 0);
  for (const auto& idx : batches_of(order, batch_size)) {
    num::Tape tape;
    const auto logits = model::classify_logits(tape, weights, gather(set.features, idx),
                                               set.graphs.supports(idx), cfg);
    const num::Tensor probs = num::ops::sigmoid(logits.value());
    for (double z : probs.values()) out.push_back(z);
  }
  return out;
}

double mean_bce(const LabeledSet& set, const num::ParamStore& weights,
                const model::DcgruConfig& cfg, int batch_size) {
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), 0);
  double total = 0.0;
  for (const auto& idx : batches_of(order, batch_size)) {
    num::Tape tape;
    const auto logits = model::classify_logits(tape, weights, gather(set.features, idx),
                                               set.graphs.supports(idx), cfg);
    const auto loss = num::bce_with_logits(logits, label_column(set.labels, idx));
    total += loss.value().item() * static_cast<double>(idx.size());
  }
  return total / static_cast<double>(set.size());
}

FinetuneResult finetune(const LabeledSet& train, const LabeledSet& val,
                        const num::ParamStore& weights, const TrainConfig& cfg,
                        const EpochCallback& on_epoch) {
  cfg.validate();
  if (train.size() == 0) throw ConfigError("finetune: empty training set");
  if (train.labels.size() != train.size() || val.labels.size() != val.size()) {
    throw ConfigError("finetune: labels and features differ in length");
  }
  check_binary_classes(train.labels, "finetune: training labels");
  check_binary_classes(val.labels, "finetune: validation labels");

  num::ParamStore params = select_params(weights, {"encoder.", "classifier."});
  Adam adam(cfg.learning_rate);
  Rng shuffle_rng(derive_seed(cfg.seed, "finetune.shuffle"));

  FinetuneResult result;
  result.report.counts = {train.size(), val.size(), 0};
  double best_auroc = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;

  // With zero epochs the starting weights are the result.
  result.best.config = cfg;
  result.best.params = params;
  result.best.rng_state = shuffle_rng.state();
  result.best.metadata = {{"stage", "finetune"}};

  for (int epoch = 0; epoch < cfg.finetune_epochs; ++epoch) {
    const auto batches = batches_of(shuffled(train.size(), shuffle_rng), cfg.batch_size);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& idx = batches[b];
      num::Tape tape;
      num::GradMap grads;
      double loss_value = 0.0;
      try {
        const auto logits = model::classify_logits(tape, params, gather(train.features, idx),
                                                   train.graphs.supports(idx), cfg.model);
        const auto loss = num::bce_with_logits(logits, label_column(train.labels, idx));
        loss_value = loss.value().item();
        grads = tape.backward(loss, params);
      } catch (const num::NonFiniteError& e) {
        throw num::NonFiniteError("finetune: non-finite value at " + where(epoch, b) + ": " + e.what());
      }
      adam.step(params, grads);
      loss_sum += loss_value * static_cast<double>(idx.size());
    }
    const double epoch_loss = loss_sum / static_cast<double>(train.size());
    const double val_auroc = auroc(predict(val, params, cfg.model), val.labels);
    const double val_loss = mean_bce(val, params, cfg.model);
    result.report.train_loss.push_back(epoch_loss);
    result.report.val_auroc.push_back(val_auroc);
    result.report.epochs = epoch + 1;
    if (on_epoch) on_epoch(epoch, epoch_loss);

    if (val_auroc > best_auroc || (val_auroc == best_auroc && val_loss < best_loss)) {
      best_auroc = val_auroc;
      best_loss = val_loss;
      since_best = 0;
      result.best.params = params;
      result.best.epoch = epoch + 1;
      result.best.rng_state = shuffle_rng.state();
      result.best.metadata = {{"stage", "finetune"}, {"val_auroc", val_auroc}, {"val_loss", val_loss}};
    } else if (++since_best >= cfg.early_stop_patience) {
      break;
    }
  }
  result.report.auroc = std::max(best_auroc, 0.0);
  result.report.auroc_mean = result.report.auroc;
  return result;
}

}  // namespace eegssl::train
