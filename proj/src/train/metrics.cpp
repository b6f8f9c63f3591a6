// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/train/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eegssl/common/error.hpp"

namespace eegssl::train {

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ConfigError("auroc: " + std::to_string(scores.size()) + " scores for " +
                      std::to_string(labels.size()) + " labels");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sweep groups of tied scores in increasing order; each positive beats every
  // negative seen in earlier groups and ties with negatives in its own group.
  double concordant = 0.0;
  double tied = 0.0;
  std::size_t neg_below = 0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t pos = 0, neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] != 0) ++pos; else ++neg;
      ++j;
    }
    concordant += static_cast<double>(pos) * static_cast<double>(neg_below);
    tied += static_cast<double>(pos) * static_cast<double>(neg);
    neg_below += neg;
    n_pos += pos;
    i = j;
  }
  const std::size_t n_neg = neg_below;
  if (n_pos == 0 || n_neg == 0) throw ConfigError("auroc: both classes must be present");
  return (concordant + 0.5 * tied) / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"auroc", r.auroc},
                     {"auroc_mean", r.auroc_mean},
                     {"auroc_std", r.auroc_std},
                     {"epochs", r.epochs},
                     {"train_loss", r.train_loss},
                     {"val_auroc", r.val_auroc},
                     {"counts", {{"train", r.counts.train}, {"val", r.counts.val}, {"test", r.counts.test}}},
                     {"repeats", r.repeats}};
}

void from_json(const nlohmann::json& j, EvalReport& r) {
  j.at("auroc").get_to(r.auroc);
  j.at("auroc_mean").get_to(r.auroc_mean);
  j.at("auroc_std").get_to(r.auroc_std);
  j.at("epochs").get_to(r.epochs);
  j.at("train_loss").get_to(r.train_loss);
  j.at("val_auroc").get_to(r.val_auroc);
  if (j.contains("counts")) {
    const auto& c = j.at("counts");
    c.at("train").get_to(r.counts.train);
    c.at("val").get_to(r.counts.val);
    c.at("test").get_to(r.counts.test);
  }
  if (j.contains("repeats")) j.at("repeats").get_to(r.repeats);
}

EvalReport aggregate(std::span<const EvalReport> runs) {
  if (runs.empty()) throw ConfigError("aggregate: no runs");
  EvalReport out = runs.front();
  out.repeats.clear();
  for (const auto& r : runs) out.repeats.push_back(r.auroc);
  const double n = static_cast<double>(runs.size());
  out.auroc_mean = std::accumulate(out.repeats.begin(), out.repeats.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : out.repeats) ss += (a - out.auroc_mean) * (a - out.auroc_mean);
  out.auroc_std = runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  out.auroc = out.auroc_mean;
  return out;
}

}  // namespace eegssl::train
