// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eegssl/common/error.hpp"
#include "eegssl/common/format.hpp"
#include "eegssl/graphs/graphs.hpp"
#include "eegssl/pretext/pretext.hpp"
#include "eegssl/signal/signal.hpp"
#include "eegssl/train/checkpoint.hpp"
#include "eegssl/train/experiment.hpp"
#include "eegssl/train/metrics.hpp"

namespace eegssl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kPathKeys[] = {"corpus", "layout", "out", "window_samples", "val_fraction",
                                     "test_fraction"};

json read_json_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

void require_exists(const fs::path& path, const char* what) {
  if (!fs::exists(path)) throw ConfigError(std::string(what) + " not found: " + path.string());
}

// Flags shared by the training-stage subcommands.
struct StageFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string corpus;
  std::string layout;
  std::string strategy;
  std::string graph_mode;
  std::optional<int> pretrain_epochs;
  std::optional<int> finetune_epochs;
  std::optional<double> label_fraction;
  int repeats = 1;
};

void add_common(CLI::App* cmd, StageFlags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--out", f.out, "Output directory");
}

void add_stage(CLI::App* cmd, StageFlags& f) {
  add_common(cmd, f);
  cmd->add_option("--corpus", f.corpus, "Directory of recording CSVs");
  cmd->add_option("--layout", f.layout, "Electrode layout CSV (name,x,y,z)");
  cmd->add_option("--strategy", f.strategy, "Corruption strategy");
  cmd->add_option("--graph-mode", f.graph_mode, "distance or correlation");
  cmd->add_option("--pretrain-epochs", f.pretrain_epochs);
  cmd->add_option("--finetune-epochs", f.finetune_epochs);
  cmd->add_option("--label-fraction", f.label_fraction, "Share of training labels used");
}

ExperimentConfig resolve(const StageFlags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    require_exists(f.config, "config");
    c = read_json_file(f.config).get<ExperimentConfig>();
  }
  if (f.seed) c.train.seed = *f.seed;
  if (!f.out.empty()) c.out = f.out;
  if (!f.corpus.empty()) c.corpus = f.corpus;
  if (!f.layout.empty()) c.layout = fs::path(f.layout);
  if (!f.strategy.empty()) c.train.strategy.strategy = pretext::parse_strategy(f.strategy);
  if (!f.graph_mode.empty()) c.train.graph_mode = graphs::parse_graph_mode(f.graph_mode);
  if (f.pretrain_epochs) c.train.pretrain_epochs = *f.pretrain_epochs;
  if (f.finetune_epochs) c.train.finetune_epochs = *f.finetune_epochs;
  if (f.label_fraction) c.train.label_fraction = *f.label_fraction;
  c.validate();
  return c;
}

graphs::ElectrodeLayout load_layout(const ExperimentConfig& c) {
  return c.layout ? graphs::read_layout_csv(*c.layout) : graphs::standard_1020_layout();
}

signal::SplitManifest load_manifest(const ExperimentConfig& c,
                                    std::span<const signal::Recording> recordings) {
  const fs::path path = c.corpus / "manifest.json";
  if (fs::exists(path)) return read_json_file(path).get<signal::SplitManifest>();
  return signal::split_by_subject(recordings, c.val_fraction, c.test_fraction, c.train.seed);
}

train::SplitWindows load_data(const ExperimentConfig& c) {
  const auto recordings = signal::load_corpus(c.corpus);
  if (recordings.empty()) throw ConfigError("no recordings in " + c.corpus.string());
  return train::split_windows(recordings, load_manifest(c, recordings),
                              static_cast<std::size_t>(c.window_samples));
}

train::EpochCallback progress(std::ostream& err, const char* stage) {
  return [&err, stage](int epoch, double loss) {
    err << stage << " epoch " << epoch + 1 << " loss " << format_double(loss) << '\n';
  };
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_synth(int subjects, int windows, double seizure_fraction, std::uint64_t seed,
              const fs::path& out_dir, std::ostream& out) {
  signal::SynthOptions o;
  o.n_subjects = subjects;
  o.windows_per_subject = windows;
  o.seizure_fraction = seizure_fraction;
  o.seed = seed;
  const auto corpus = signal::synth_corpus(o);
  fs::create_directories(out_dir);
  json files = json::array();
  for (const auto& rec : corpus) {
    const fs::path file = out_dir / (rec.subject_id + ".csv");
    signal::write_recording_csv(file, rec);
    files.push_back(file.filename().string());
  }
  const auto manifest = signal::split_by_subject(corpus, 0.1, 0.2, seed);
  write_text(out_dir / "manifest.json", dump(json(manifest)));
  out << dump({{"out", out_dir.string()},
               {"subjects", subjects},
               {"windows", subjects * windows},
               {"files", files},
               {"manifest", json(manifest)}});
  return kExitOk;
}

int cmd_preprocess(const ExperimentConfig& c, std::ostream& out) {
  const auto data = load_data(c);
  const auto steps = static_cast<std::size_t>(c.train.feature_steps);
  std::ostringstream csv;
  csv << "split,subject,start,label,values\n";
  json counts = json::object();
  for (const auto& [name, windows] : {std::pair{"train", &data.train}, std::pair{"val", &data.val},
                                      std::pair{"test", &data.test}}) {
    counts[name] = windows->size();
    for (const auto& w : *windows) {
      const auto f = signal::featurize(w, steps);
      csv << name << ',' << w.source.subject_id << ',' << w.source.start << ',' << w.label << ',';
      bool first = true;
      for (double v : f.values.values()) {
        if (!first) csv << ' ';
        csv << format_double(v);
        first = false;
      }
      csv << '\n';
    }
  }
  write_text(c.out / "features.csv", csv.str());
  write_text(c.out / "manifest.json", dump(json(data.manifest)));
  const auto& first = data.train.empty() ? data.test : data.train;
  json shape = json::array();
  if (!first.empty()) shape = {steps, first.front().channels(), first.front().timepoints() / steps / 2};
  out << dump({{"features", (c.out / "features.csv").string()},
               {"counts", counts},
               {"feature_shape", shape}});
  return kExitOk;
}

int cmd_build_graph(const ExperimentConfig& c, std::size_t window_index, std::ostream& out) {
  const auto layout = load_layout(c);
  graphs::Graph g;
  if (c.train.graph_mode == graphs::GraphMode::distance) {
    g = graphs::build_distance_graph(layout, c.train.kappa, c.train.threshold_mode);
  } else {
    if (c.corpus.empty()) throw ConfigError("correlation graphs need --corpus");
    const auto data = load_data(c);
    if (window_index >= data.train.size()) {
      throw ConfigError("window index " + std::to_string(window_index) + " out of range (" +
                        std::to_string(data.train.size()) + " training windows)");
    }
    g = graphs::build_correlation_graph(data.train[window_index].matrix,
                                        static_cast<std::size_t>(c.train.k_neighbors), layout.names);
  }
  const fs::path file = c.out / "graph.csv";
  fs::create_directories(c.out);
  graphs::write_matrix_csv(file, g.weights());
  std::size_t edges = 0;
  for (double w : g.weights().values()) edges += w != 0.0;
  out << dump({{"graph", file.string()},
               {"mode", graphs::to_string(g.mode())},
               {"nodes", g.nodes()},
               {"nonzero", edges}});
  return kExitOk;
}

int cmd_pretrain(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const auto data = load_data(c);
  const auto result = train::pretrain_on(data, c.train, load_layout(c), progress(err, "pretrain"));
  const fs::path file = c.out / "pretrained.ckpt";
  fs::create_directories(c.out);
  result.checkpoint.save(file);
  out << dump({{"checkpoint", file.string()},
               {"strategy", pretext::to_string(c.train.strategy.strategy)},
               {"graph_mode", graphs::to_string(c.train.graph_mode)},
               {"windows", data.train.size()},
               {"loss", result.epoch_loss}});
  return kExitOk;
}

int cmd_finetune(const ExperimentConfig& c, const std::string& pretrained, bool no_pretrain,
                 int repeats, std::ostream& out, std::ostream& err) {
  if (no_pretrain == !pretrained.empty()) {
    throw ConfigError("finetune needs exactly one of --pretrained or --no-pretrain");
  }
  if (repeats < 1) throw ConfigError("--repeats must be at least 1");
  std::optional<train::Checkpoint> ck;
  if (!no_pretrain) {
    require_exists(pretrained, "pretrained checkpoint");
    ck = train::Checkpoint::load(pretrained);
  }
  const auto data = load_data(c);
  const auto layout = load_layout(c);
  fs::create_directories(c.out);
  std::vector<train::EvalReport> runs;
  json checkpoints = json::array();
  for (int i = 0; i < repeats; ++i) {
    train::TrainConfig cfg = c.train;
    cfg.seed = c.train.seed + static_cast<std::uint64_t>(i);
    err << "finetune run " << i + 1 << "/" << repeats << " seed " << cfg.seed << '\n';
    auto arm = train::finetune_on(data, cfg, layout, ck ? &*ck : nullptr, progress(err, "finetune"));
    arm.classifier.metadata["pretrained"] = !no_pretrain;
    const fs::path file =
        c.out / (repeats == 1 ? std::string("classifier.ckpt") : "classifier_" + std::to_string(i) + ".ckpt");
    arm.classifier.save(file);
    checkpoints.push_back(file.string());
    runs.push_back(std::move(arm.report));
  }
  const train::EvalReport report = repeats == 1 ? runs.front() : train::aggregate(runs);
  write_text(c.out / "report.json", dump(json(report)));
  json summary = report;
  summary["checkpoints"] = checkpoints;
  summary["pretrained"] = !no_pretrain;
  out << dump(summary);
  return kExitOk;
}

int cmd_evaluate(const ExperimentConfig& c, const std::string& checkpoint, std::ostream& out) {
  require_exists(checkpoint, "checkpoint");
  const auto ck = train::Checkpoint::load(checkpoint);
  // Graph and model settings come from the run that produced the checkpoint.
  const auto cfg = ck.config.get<train::TrainConfig>();
  const auto data = load_data(c);
  train::EvalReport report;
  report.auroc = train::evaluate_on(data.test, ck, cfg, load_layout(c));
  report.auroc_mean = report.auroc;
  report.epochs = ck.epoch;
  report.counts.test = data.test.size();
  if (!c.out.empty() && c.out != ".") write_text(c.out / "evaluation.json", dump(json(report)));
  out << dump(json(report));
  return kExitOk;
}

int cmd_inspect(const ExperimentConfig& c, const std::string& recording, std::size_t start,
                std::ostream& out) {
  signal::Recording rec;
  if (!recording.empty()) {
    require_exists(recording, "recording");
    rec = signal::read_recording_csv(recording);
  } else {
    signal::SynthOptions o;
    o.n_subjects = 1;
    o.windows_per_subject = 1;
    o.seizure_fraction = 1.0;
    o.seed = c.train.seed;
    rec = signal::synth_corpus(o).front();
  }
  const auto windows = signal::segment_windows_by_length(rec, static_cast<std::size_t>(c.window_samples));
  const auto it = std::find_if(windows.begin(), windows.end(),
                               [&](const signal::SignalWindow& w) { return w.source.start == start; });
  if (it == windows.end()) {
    throw ConfigError("no window starts at sample " + std::to_string(start));
  }
  pretext::CorruptionSpec spec = c.train.strategy;
  spec.seed = derive_seed(c.train.seed, spec.seed);
  const auto after = pretext::corrupt(*it, spec, pretext::pair_seed(spec, it->source));

  std::ostringstream csv;
  csv << "block,channel";
  for (std::size_t t = 0; t < it->timepoints(); ++t) csv << ",t" << t;
  csv << '\n';
  for (const auto& [block, w] : {std::pair{"before", &*it}, std::pair{"after", &after}}) {
    for (std::size_t ch = 0; ch < w->channels(); ++ch) {
      csv << block << ',' << rec.channel_names[ch];
      for (std::size_t t = 0; t < w->timepoints(); ++t) csv << ',' << format_double(w->matrix(ch, t));
      csv << '\n';
    }
  }
  const fs::path file = c.out / ("transform_" + std::string(pretext::to_string(spec.strategy)) + ".csv");
  write_text(file, csv.str());
  std::size_t changed = 0;
  for (std::size_t i = 0; i < after.matrix.size(); ++i) changed += after.matrix[i] != it->matrix[i];
  out << dump({{"csv", file.string()},
               {"strategy", pretext::to_string(spec.strategy)},
               {"subject", rec.subject_id},
               {"start", start},
               {"changed_entries", changed}});
  return kExitOk;
}

}  // namespace

void ExperimentConfig::validate() const {
  train.validate();
  if (window_samples <= 0) throw ConfigError("window_samples must be positive");
  if (window_samples % train.feature_steps != 0) {
    throw ConfigError("window_samples " + std::to_string(window_samples) +
                      " is not divisible by feature_steps " + std::to_string(train.feature_steps));
  }
  const int p = window_samples / train.feature_steps / 2;
  if (p != train.model.input_features) {
    throw ConfigError("model.input_features is " + std::to_string(train.model.input_features) +
                      " but windows of " + std::to_string(window_samples) + " samples in " +
                      std::to_string(train.feature_steps) + " steps give " + std::to_string(p));
  }
  if (!(val_fraction >= 0.0 && test_fraction >= 0.0 && val_fraction + test_fraction < 1.0)) {
    throw ConfigError("val_fraction and test_fraction must be non-negative and sum below 1");
  }
  if (!corpus.empty()) require_exists(corpus, "corpus directory");
  if (layout) require_exists(*layout, "layout file");
}

void to_json(json& j, const ExperimentConfig& c) {
  j = c.train;
  j["corpus"] = c.corpus.string();
  if (c.layout) j["layout"] = c.layout->string();
  j["out"] = c.out.string();
  j["window_samples"] = c.window_samples;
  j["val_fraction"] = c.val_fraction;
  j["test_fraction"] = c.test_fraction;
}

void from_json(const json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  json rest = j;
  try {
    if (j.contains("corpus")) c.corpus = j.at("corpus").get<std::string>();
    if (j.contains("layout")) c.layout = fs::path(j.at("layout").get<std::string>());
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("window_samples")) j.at("window_samples").get_to(c.window_samples);
    if (j.contains("val_fraction")) j.at("val_fraction").get_to(c.val_fraction);
    if (j.contains("test_fraction")) j.at("test_fraction").get_to(c.test_fraction);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  for (const char* key : kPathKeys) rest.erase(key);
  c.train = rest.get<train::TrainConfig>();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-supervised graph pretraining for multichannel seizure detection", "eegssl"};
  app.require_subcommand(1);

  StageFlags f;

  int subjects = 20, windows = 25;
  double seizure_fraction = 0.3;
  auto* synth = app.add_subcommand("synth-data", "Write a synthetic corpus and split manifest");
  add_common(synth, f);
  synth->add_option("--subjects", subjects);
  synth->add_option("--windows-per-subject", windows);
  synth->add_option("--seizure-fraction", seizure_fraction);

  auto* pre = app.add_subcommand("preprocess", "Segment and featurize a corpus");
  add_stage(pre, f);

  std::size_t window_index = 0;
  auto* graph = app.add_subcommand("build-graph", "Write a graph weight matrix as CSV");
  add_stage(graph, f);
  graph->add_option("--window", window_index, "Training window for correlation graphs");

  auto* pt = app.add_subcommand("pretrain", "Denoising pretraining");
  add_stage(pt, f);

  std::string pretrained;
  bool no_pretrain = false;
  auto* ft = app.add_subcommand("finetune", "Finetune a classifier and report test AUROC");
  add_stage(ft, f);
  ft->add_option("--pretrained", pretrained, "Pretrained checkpoint");
  ft->add_flag("--no-pretrain", no_pretrain, "Start from a fresh encoder");
  ft->add_option("--repeats", f.repeats, "Independent runs with seeds seed+i");

  std::string checkpoint;
  auto* ev = app.add_subcommand("evaluate", "Test AUROC of a classifier checkpoint");
  add_stage(ev, f);
  ev->add_option("--checkpoint", checkpoint)->required();

  std::string recording;
  std::size_t start = 0;
  auto* inspect = app.add_subcommand("inspect-transform", "Before/after CSV of one corruption");
  add_stage(inspect, f);
  inspect->add_option("--recording", recording, "Recording CSV (synthetic window when omitted)");
  inspect->add_option("--start", start, "Window start sample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    err << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*synth) {
      if (subjects <= 0) throw ConfigError("--subjects must be positive");
      if (windows <= 0) throw ConfigError("--windows-per-subject must be positive");
      return cmd_synth(subjects, windows, seizure_fraction, f.seed.value_or(0),
                       f.out.empty() ? fs::path("corpus") : fs::path(f.out), out);
    }
    const ExperimentConfig c = resolve(f);
    const bool needs_corpus = *pre || *pt || *ft || *ev;
    if (needs_corpus && c.corpus.empty()) throw ConfigError("--corpus is required");
    if (*pre) return cmd_preprocess(c, out);
    if (*graph) return cmd_build_graph(c, window_index, out);
    if (*pt) return cmd_pretrain(c, out, err);
    if (*ft) return cmd_finetune(c, pretrained, no_pretrain, f.repeats, out, err);
    if (*ev) return cmd_evaluate(c, checkpoint, out);
    if (*inspect) return cmd_inspect(c, recording, start, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace eegssl::cli
