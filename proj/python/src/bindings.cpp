// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "eegssl/common/error.hpp"
#include "eegssl/graphs/graphs.hpp"
#include "eegssl/pretext/pretext.hpp"
#include "eegssl/signal/signal.hpp"
#include "eegssl/train/experiment.hpp"
#include "eegssl/train/metrics.hpp"

namespace py = pybind11;
using namespace eegssl;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_numpy(const num::Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  py::array_t<double> out(shape);
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

num::Tensor from_numpy(const Array& a) {
  num::Shape shape(a.shape(), a.shape() + a.ndim());
  return num::Tensor(shape, std::vector<double>(a.data(), a.data() + a.size()));
}

signal::SignalWindow window_of(const Array& a) {
  if (a.ndim() != 2) throw ConfigError("window must be a 2-D array (channels x timepoints)");
  signal::SignalWindow w;
  w.matrix = from_numpy(a);
  return w;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json py_to_json(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph pretraining for multichannel seizure detection";
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<num::NonFiniteError>(m, "NonFiniteError", PyExc_ArithmeticError);

  m.def("channel_names", &signal::standard_channel_names);

  m.def("standard_layout", [] {
    const auto l = graphs::standard_1020_layout();
    return py::make_tuple(l.names, to_numpy(l.positions));
  }, "Names and unit-sphere positions of the 19-channel montage.");

  m.def("synth_corpus", [](int n_subjects, int windows_per_subject, double seizure_fraction, std::uint64_t seed) {
    signal::SynthOptions o;
    o.n_subjects = n_subjects;
    o.windows_per_subject = windows_per_subject;
    o.seizure_fraction = seizure_fraction;
    o.seed = seed;
    py::list out;
    for (const auto& rec : signal::synth_corpus(o)) {
      py::dict d;
      d["subject_id"] = rec.subject_id;
      d["sampling_rate_hz"] = rec.sampling_rate_hz;
      d["channel_names"] = rec.channel_names;
      d["samples"] = to_numpy(rec.samples);
      d["labels"] = std::vector<int>(rec.labels.begin(), rec.labels.end());
      out.append(d);
    }
    return out;
  }, py::arg("n_subjects") = 20, py::arg("windows_per_subject") = 25, py::arg("seizure_fraction") = 0.3,
     py::arg("seed") = 0);

  m.def("featurize", [](const Array& window, std::size_t steps) {
    return to_numpy(signal::featurize(window_of(window), steps).values);
  }, py::arg("window"), py::arg("steps") = 4, "Log-amplitude FFT features of shape (steps, channels, P).");

  m.def("distance_graph", [](const Array& positions, double kappa, const std::string& threshold_mode) {
    graphs::ElectrodeLayout l;
    l.positions = from_numpy(positions);
    for (std::size_t i = 0; i < l.positions.rows(); ++i) l.names.push_back("N" + std::to_string(i));
    return to_numpy(graphs::build_distance_graph(l, kappa, graphs::parse_threshold_mode(threshold_mode)).weights());
  }, py::arg("positions"), py::arg("kappa") = 0.9, py::arg("threshold_mode") = "distance");

  m.def("correlation_graph", [](const Array& window, std::size_t k) {
    return to_numpy(graphs::build_correlation_graph(from_numpy(window), k).weights());
  }, py::arg("window"), py::arg("k_neighbors") = 3);

  m.def("transitions", [](const Array& weights) {
    const auto t = graphs::transitions(from_numpy(weights));
    return py::make_tuple(to_numpy(t.out), to_numpy(t.in));
  }, "Forward and backward random-walk transition matrices.");

  m.def("strategies", [] {
    std::vector<std::string> out;
    for (auto s : pretext::all_strategies()) out.emplace_back(pretext::to_string(s));
    return out;
  });

  m.def("corrupt", [](const Array& window, const std::string& strategy, std::uint64_t seed, double point_fraction,
                      std::optional<std::size_t> channel, const std::string& sample_mode) {
    pretext::CorruptionSpec spec;
    spec.strategy = pretext::parse_strategy(strategy);
    spec.point_fraction = point_fraction;
    if (channel) spec.channel = *channel;
    spec.sample_mode = pretext::parse_sample_mode(sample_mode);
    const auto w = window_of(window);
    spec.validate(w.channels());
    return to_numpy(pretext::corrupt(w, spec, seed).matrix);
  }, py::arg("window"), py::arg("strategy"), py::arg("seed") = 0, py::arg("point_fraction") = 0.2,
     py::arg("channel") = py::none(), py::arg("sample_mode") = "neighbor_average");

  m.def("auroc", [](const std::vector<double>& scores, const std::vector<int>& labels) {
    return train::auroc(scores, labels);
  });

  m.def("default_config", [] { return json_to_py(train::TrainConfig{}); });

  m.def("run_arm", [](const py::object& config, bool pretrain, int n_subjects, int windows_per_subject,
                      std::uint64_t corpus_seed) {
    train::TrainConfig cfg;
    if (!config.is_none()) cfg = py_to_json(config).get<train::TrainConfig>();
    signal::SynthOptions o;
    o.n_subjects = n_subjects;
    o.windows_per_subject = windows_per_subject;
    o.seed = corpus_seed;
    train::ArmResult r;
    {
      py::gil_scoped_release release;
      const auto recs = signal::synth_corpus(o);
      const auto data = train::split_windows(recs, signal::split_by_subject(recs, 0.1, 0.2, corpus_seed), 200);
      r = train::run_arm(data, cfg, graphs::standard_1020_layout(), pretrain);
    }
    py::dict out = json_to_py(r.report);
    out["pretrain_loss"] = r.pretrain_loss;
    return out;
  }, py::arg("config") = py::none(), py::arg("pretrain") = true, py::arg("n_subjects") = 20,
     py::arg("windows_per_subject") = 25, py::arg("corpus_seed") = 1,
     "One experiment arm on a synthetic corpus; returns the evaluation report.");

  m.def("cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"eegssl"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
