// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/train/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "eegssl/common/error.hpp"
#include "eegssl/common/random.hpp"
#include "eegssl/pretext/pretext.hpp"

namespace eegssl::train {

SplitWindows split_windows(std::span<const signal::Recording> recordings,
                           const signal::SplitManifest& manifest, std::size_t window_samples) {
  const std::set<std::string> train(manifest.train.begin(), manifest.train.end());
  const std::set<std::string> val(manifest.val.begin(), manifest.val.end());
  const std::set<std::string> test(manifest.test.begin(), manifest.test.end());
  SplitWindows out;
  out.manifest = manifest;
  for (const auto& rec : recordings) {
    std::vector<signal::SignalWindow>* dest = nullptr;
    if (train.count(rec.subject_id)) dest = &out.train;
    else if (val.count(rec.subject_id)) dest = &out.val;
    else if (test.count(rec.subject_id)) dest = &out.test;
    else throw ConfigError("subject " + rec.subject_id + " is not in the split manifest");
    auto windows = signal::segment_windows_by_length(rec, window_samples);
    dest->insert(dest->end(), std::make_move_iterator(windows.begin()),
                 std::make_move_iterator(windows.end()));
  }
  return out;
}

std::vector<std::size_t> label_subset(std::span<const signal::SignalWindow> windows,
                                      double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("label_fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> keep;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if ((windows[i].label != 0 ? 1 : 0) == cls) members.push_back(i);
    }
    if (members.empty()) continue;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls) + 0x6c6162656cULL));
    for (std::size_t i = members.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
      std::swap(members[i - 1], members[j]);
    }
    const auto n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size()))));
    keep.insert(keep.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n));
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

LabeledSet make_labeled_set(std::span<const signal::SignalWindow> windows, const TrainConfig& cfg,
                            const graphs::ElectrodeLayout& layout) {
  LabeledSet set;
  set.features.reserve(windows.size());
  set.labels.reserve(windows.size());
  for (const auto& w : windows) {
    set.features.push_back(signal::featurize(w, static_cast<std::size_t>(cfg.feature_steps)));
    set.labels.push_back(w.label != 0 ? 1 : 0);
  }
  set.graphs = build_graphs(cfg, windows, layout);
  return set;
}

PretrainResult pretrain_on(const SplitWindows& data, const TrainConfig& cfg,
                           const graphs::ElectrodeLayout& layout, const EpochCallback& on_epoch) {
  cfg.validate();
  pretext::CorruptionSpec spec = cfg.strategy;
  spec.seed = derive_seed(cfg.seed, spec.seed);
  const auto pairs = pretext::make_pairs(data.train, spec);
  const GraphSet graphs = build_graphs(cfg, data.train, layout);
  return pretrain(pairs, graphs, cfg, nullptr, on_epoch);
}

ArmResult finetune_on(const SplitWindows& data, const TrainConfig& cfg,
                      const graphs::ElectrodeLayout& layout, const Checkpoint* pretrained,
                      const EpochCallback& on_epoch) {
  cfg.validate();
  const std::uint64_t head_seed = derive_seed(cfg.seed, "classifier");
  num::ParamStore weights;
  if (pretrained) {
    weights = transfer_weights(*pretrained, cfg.model, head_seed);
  } else {
    weights = fresh_classifier_weights(cfg.model, cfg.seed);
    const auto head = select_params(init_params(cfg.model, head_seed), {"classifier."});
    for (const auto& [name, value] : head) weights.set(name, value);
  }

  const auto keep = label_subset(data.train, cfg.label_fraction, derive_seed(cfg.seed, "labels"));
  std::vector<signal::SignalWindow> labeled;
  labeled.reserve(keep.size());
  for (std::size_t i : keep) labeled.push_back(data.train[i]);

  const LabeledSet train = make_labeled_set(labeled, cfg, layout);
  const LabeledSet val = make_labeled_set(data.val, cfg, layout);
  auto ft = finetune(train, val, weights, cfg, on_epoch);

  ArmResult result;
  result.report = ft.report;
  result.report.counts = {train.size(), val.size(), data.test.size()};
  result.classifier = std::move(ft.best);
  result.report.auroc = evaluate_on(data.test, result.classifier, cfg, layout);
  result.report.auroc_mean = result.report.auroc;
  result.report.auroc_std = 0.0;
  return result;
}

double evaluate_on(std::span<const signal::SignalWindow> windows, const Checkpoint& classifier,
                   const TrainConfig& cfg, const graphs::ElectrodeLayout& layout) {
  const LabeledSet set = make_labeled_set(windows, cfg, layout);
  return auroc(predict(set, classifier.params, cfg.model), set.labels);
}

ArmResult run_arm(const SplitWindows& data, const TrainConfig& cfg,
                  const graphs::ElectrodeLayout& layout, bool with_pretraining) {
  if (!with_pretraining) return finetune_on(data, cfg, layout, nullptr);
  const PretrainResult pre = pretrain_on(data, cfg, layout);
  ArmResult result = finetune_on(data, cfg, layout, &pre.checkpoint);
  result.pretrain_loss = pre.epoch_loss;
  return result;
}

EvalReport run_repeats(const SplitWindows& data, const TrainConfig& cfg,
                       const graphs::ElectrodeLayout& layout, bool with_pretraining, int repeats) {
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  std::vector<EvalReport> runs;
  for (int i = 0; i < repeats; ++i) {
    TrainConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(i);
    runs.push_back(run_arm(data, c, layout, with_pretraining).report);
  }
  return aggregate(runs);
}

}  // namespace eegssl::train
