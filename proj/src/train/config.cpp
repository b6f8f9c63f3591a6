// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/train/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <iterator>

#include "eegssl/common/error.hpp"

namespace eegssl::train {

double ScheduledSampling::probability(std::uint64_t step) const {
  const double c = decay_constant;
  return initial_prob * c / (c + std::exp(static_cast<double>(step) / c));
}

void TrainConfig::validate() const {
  if (batch_size <= 0 || pretrain_epochs <= 0 || finetune_epochs <= 0) {
    throw ConfigError("train config: batch_size and epoch counts must be positive");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("train config: learning_rate must be positive");
  if (!(scheduled_sampling.decay_constant > 0.0)) {
    throw ConfigError("train config: scheduled_sampling.decay_constant must be positive");
  }
  if (!(scheduled_sampling.initial_prob >= 0.0 && scheduled_sampling.initial_prob <= 1.0)) {
    throw ConfigError("train config: scheduled_sampling.initial_prob must lie in [0, 1]");
  }
  if (feature_steps <= 0) throw ConfigError("train config: feature_steps must be positive");
  if (k_neighbors <= 0) throw ConfigError("train config: k_neighbors must be positive");
  if (early_stop_patience <= 0) throw ConfigError("train config: early_stop_patience must be positive");
  if (!(label_fraction > 0.0 && label_fraction <= 1.0)) {
    throw ConfigError("train config: label_fraction must lie in (0, 1]");
  }
  model.validate();
}

TrainConfig TrainConfig::full_scale_preset() {
  TrainConfig c;
  c.batch_size = 1500;
  c.pretrain_epochs = 350;
  c.finetune_epochs = 100;
  return c;
}

void to_json(nlohmann::json& j, const ScheduledSampling& s) {
  j = nlohmann::json{{"initial_prob", s.initial_prob}, {"decay_constant", s.decay_constant}};
}

void from_json(const nlohmann::json& j, ScheduledSampling& s) {
  if (j.contains("initial_prob")) j.at("initial_prob").get_to(s.initial_prob);
  if (j.contains("decay_constant")) j.at("decay_constant").get_to(s.decay_constant);
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"batch_size", c.batch_size},
                     {"pretrain_epochs", c.pretrain_epochs},
                     {"finetune_epochs", c.finetune_epochs},
                     {"learning_rate", c.learning_rate},
                     {"scheduled_sampling", c.scheduled_sampling},
                     {"seed", c.seed},
                     {"graph_mode", graphs::to_string(c.graph_mode)},
                     {"strategy", c.strategy},
                     {"model", c.model},
                     {"feature_steps", c.feature_steps},
                     {"kappa", c.kappa},
                     {"threshold_mode", graphs::to_string(c.threshold_mode)},
                     {"k_neighbors", c.k_neighbors},
                     {"early_stop_patience", c.early_stop_patience},
                     {"label_fraction", c.label_fraction}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  static const char* kKnown[] = {"batch_size",     "pretrain_epochs", "finetune_epochs",
                                 "learning_rate",  "scheduled_sampling", "seed",
                                 "graph_mode",     "strategy",        "model",
                                 "feature_steps",  "kappa",           "threshold_mode",
                                 "k_neighbors",    "early_stop_patience", "label_fraction"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw ConfigError("train config: unknown key '" + key + "'");
    }
  }
  try {
    if (j.contains("batch_size")) j.at("batch_size").get_to(c.batch_size);
    if (j.contains("pretrain_epochs")) j.at("pretrain_epochs").get_to(c.pretrain_epochs);
    if (j.contains("finetune_epochs")) j.at("finetune_epochs").get_to(c.finetune_epochs);
    if (j.contains("learning_rate")) j.at("learning_rate").get_to(c.learning_rate);
    if (j.contains("scheduled_sampling")) j.at("scheduled_sampling").get_to(c.scheduled_sampling);
    if (j.contains("seed")) j.at("seed").get_to(c.seed);
    if (j.contains("graph_mode")) c.graph_mode = graphs::parse_graph_mode(j.at("graph_mode").get<std::string>());
    if (j.contains("strategy")) j.at("strategy").get_to(c.strategy);
    if (j.contains("model")) j.at("model").get_to(c.model);
    if (j.contains("feature_steps")) j.at("feature_steps").get_to(c.feature_steps);
    if (j.contains("kappa")) j.at("kappa").get_to(c.kappa);
    if (j.contains("threshold_mode")) {
      c.threshold_mode = graphs::parse_threshold_mode(j.at("threshold_mode").get<std::string>());
    }
    if (j.contains("k_neighbors")) j.at("k_neighbors").get_to(c.k_neighbors);
    if (j.contains("early_stop_patience")) j.at("early_stop_patience").get_to(c.early_stop_patience);
    if (j.contains("label_fraction")) j.at("label_fraction").get_to(c.label_fraction);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
}

}  // namespace eegssl::train
