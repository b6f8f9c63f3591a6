// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/signal/signal.hpp"

#include <fftw3.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "eegssl/common/error.hpp"
#include "eegssl/common/format.hpp"
#include "eegssl/common/random.hpp"

namespace eegssl::signal {

namespace {

constexpr double kSpikeWaveHz = 3.0;
constexpr double kSeizureGain = 3.0;
constexpr int kMinSeizureChannels = 8;

// One period of a spike-and-wave complex, peak-normalized: a sharp spike on
// top of the slow wave.
double spike_wave(double phase) {
  const double spike = std::exp(-std::pow((phase - 0.15) / 0.04, 2.0));
  const double wave = -std::sin(2.0 * std::numbers::pi * phase);
  return (spike + 0.6 * wave) / 1.25;
}

double parse_double(std::string_view s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" +
                  std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = line.find(',', pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

// FFTW planning is not thread-safe; plans are cached per length and executed
// on caller-owned buffers through the new-array interface.
class RealFft {
 public:
  static const RealFft& for_length(std::size_t m) {
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<RealFft>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[m];
    if (!slot) slot.reset(new RealFft(m));
    return *slot;
  }

  ~RealFft() { fftw_destroy_plan(plan_); }

  // Fills out[0..m/2] with the non-redundant half spectrum.
  void forward(std::vector<double>& in, std::vector<fftw_complex>& out) const {
    fftw_execute_dft_r2c(plan_, in.data(), out.data());
  }

 private:
  explicit RealFft(std::size_t m) {
    std::vector<double> in(m);
    std::vector<fftw_complex> out(m / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(), out.data(),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  }

  fftw_plan plan_;
};

}  // namespace

const std::vector<std::string>& standard_channel_names() {
  static const std::vector<std::string> names = {
      "FP1", "FP2", "F7", "F3", "FZ", "F4", "F8", "T3", "C3", "CZ",
      "C4",  "T4",  "T5", "P3", "PZ", "P4", "T6", "O1", "O2"};
  return names;
}

void Recording::validate() const {
  if (!(sampling_rate_hz > 0.0)) throw ConfigError("recording " + subject_id + ": sampling rate must be positive");
  if (samples.rank() != 2) throw ConfigError("recording " + subject_id + ": samples must be channels x timepoints");
  if (channel_names.size() != channels()) {
    throw ConfigError("recording " + subject_id + ": " + std::to_string(channel_names.size()) +
                      " channel names for " + std::to_string(channels()) + " channels");
  }
  if (labels.size() != timepoints()) {
    throw ConfigError("recording " + subject_id + ": " + std::to_string(labels.size()) +
                      " labels for " + std::to_string(timepoints()) + " timepoints");
  }
}

num::Tensor FeatureTensor::step(std::size_t t) const {
  const std::size_t n = nodes();
  const std::size_t p = features();
  std::vector<double> out(values.values().begin() + static_cast<std::ptrdiff_t>(t * n * p),
                          values.values().begin() + static_cast<std::ptrdiff_t>((t + 1) * n * p));
  return num::Tensor({n, p}, std::move(out));
}

void to_json(nlohmann::json& j, const SplitManifest& m) {
  j = nlohmann::json{{"train", m.train}, {"val", m.val}, {"test", m.test}, {"seed", m.seed}};
}

void from_json(const nlohmann::json& j, SplitManifest& m) {
  j.at("train").get_to(m.train);
  j.at("val").get_to(m.val);
  j.at("test").get_to(m.test);
  j.at("seed").get_to(m.seed);
}

std::vector<Recording> synth_corpus(const SynthOptions& o) {
  if (o.n_subjects <= 0) throw ConfigError("synth_corpus: n_subjects must be positive");
  if (o.windows_per_subject <= 0) throw ConfigError("synth_corpus: windows_per_subject must be positive");
  if (o.window_samples <= 0) throw ConfigError("synth_corpus: window_samples must be positive");
  if (!(o.seizure_fraction >= 0.0 && o.seizure_fraction <= 1.0)) {
    throw ConfigError("synth_corpus: seizure_fraction must lie in [0, 1]");
  }
  if (!(o.sampling_rate_hz > 0.0)) throw ConfigError("synth_corpus: sampling rate must be positive");

  const auto& names = standard_channel_names();
  const std::size_t channels = names.size();
  const std::size_t win = static_cast<std::size_t>(o.window_samples);
  const std::size_t total = win * static_cast<std::size_t>(o.windows_per_subject);
  const auto n_seizure_windows = static_cast<std::size_t>(
      std::lround(o.seizure_fraction * o.windows_per_subject));

  std::vector<Recording> corpus;
  corpus.reserve(static_cast<std::size_t>(o.n_subjects));
  for (int s = 0; s < o.n_subjects; ++s) {
    char id[32];
    std::snprintf(id, sizeof(id), "subj%03d", s);
    Rng rng(derive_seed(o.seed, std::string_view(id)));

    Recording rec;
    rec.subject_id = id;
    rec.sampling_rate_hz = o.sampling_rate_hz;
    rec.channel_names = names;
    rec.samples = num::Tensor({channels, total});
    rec.labels.assign(total, 0);

    const double amp = o.background_amplitude * rng.uniform(0.8, 1.2);
    const double noise_sd = 0.2 * amp;
    for (std::size_t c = 0; c < channels; ++c) {
      double freq[3], phase[3];
      for (int k = 0; k < 3; ++k) {
        freq[k] = rng.uniform(8.0, 12.0);
        phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
      for (std::size_t t = 0; t < total; ++t) {
        const double time = static_cast<double>(t) / o.sampling_rate_hz;
        double v = 0.0;
        for (int k = 0; k < 3; ++k) v += amp * std::sin(2.0 * std::numbers::pi * freq[k] * time + phase[k]);
        rec.samples(c, t) = v + rng.normal(0.0, noise_sd);
      }
    }

    if (n_seizure_windows > 0) {
      const auto first = static_cast<std::size_t>(rng.uniform_int(
          0, o.windows_per_subject - static_cast<std::int64_t>(n_seizure_windows)));
      const std::size_t begin = first * win;
      const std::size_t end = begin + n_seizure_windows * win;

      // Random subset of at least kMinSeizureChannels channels.
      std::vector<std::size_t> order(channels);
      for (std::size_t c = 0; c < channels; ++c) order[c] = c;
      for (std::size_t i = channels - 1; i > 0; --i) {
        std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
      }
      const auto involved = static_cast<std::size_t>(
          rng.uniform_int(kMinSeizureChannels, static_cast<std::int64_t>(channels)));
      const double phase0 = rng.uniform();

      for (std::size_t i = 0; i < involved; ++i) {
        const std::size_t c = order[i];
        for (std::size_t t = begin; t < end; ++t) {
          const double time = static_cast<double>(t - begin) / o.sampling_rate_hz;
          const double phase = std::fmod(kSpikeWaveHz * time + phase0, 1.0);
          rec.samples(c, t) += kSeizureGain * amp * spike_wave(phase);
        }
      }
      std::fill(rec.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                rec.labels.begin() + static_cast<std::ptrdiff_t>(end), 1);
    }
    corpus.push_back(std::move(rec));
  }
  return corpus;
}

SplitManifest split_by_subject(std::span<const Recording> recordings, double val_frac,
                               double test_frac, std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& r : recordings) ids.push_back(r.subject_id);
  return split_by_subject(std::move(ids), val_frac, test_frac, seed);
}

SplitManifest split_by_subject(std::vector<std::string> ids, double val_frac, double test_frac,
                               std::uint64_t seed) {
  if (!(val_frac > 0.0 && val_frac < 1.0) || !(test_frac > 0.0 && test_frac < 1.0) ||
      !(val_frac + test_frac < 1.0)) {
    throw ConfigError("split_by_subject: fractions must lie in (0,1) and sum below 1");
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const std::size_t n = ids.size();
  if (n < 3) throw ConfigError("split_by_subject: need at least 3 subjects, got " + std::to_string(n));

  auto count = [n](double frac) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(frac * static_cast<double>(n))));
  };
  const std::size_t n_test = count(test_frac);
  const std::size_t n_val = count(val_frac);
  if (n_test + n_val >= n) {
    throw ConfigError("split_by_subject: fractions leave no training subjects");
  }

  Rng rng(derive_seed(seed, std::string_view("split")));
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(ids[i], ids[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
  }

  SplitManifest m;
  m.seed = seed;
  m.test.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
  m.val.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_test),
               ids.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
  m.train.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), ids.end());
  std::sort(m.train.begin(), m.train.end());
  std::sort(m.val.begin(), m.val.end());
  std::sort(m.test.begin(), m.test.end());
  return m;
}

std::vector<SignalWindow> segment_windows(const Recording& recording, double window_seconds) {
  const double len = window_seconds * recording.sampling_rate_hz;
  const double rounded = std::round(len);
  if (!(rounded >= 1.0) || std::abs(len - rounded) > 1e-9 * std::max(1.0, len)) {
    throw ConfigError("segment_windows: window of " + format_double(window_seconds) + " s at " +
                      format_double(recording.sampling_rate_hz) +
                      " Hz is not a positive whole number of samples");
  }
  return segment_windows_by_length(recording, static_cast<std::size_t>(rounded));
}

std::vector<SignalWindow> segment_windows_by_length(const Recording& recording,
                                                    std::size_t len) {
  recording.validate();
  if (len == 0) throw ConfigError("segment_windows: window length must be positive");
  const std::size_t channels = recording.channels();
  const std::size_t count = recording.timepoints() / len;
  std::vector<SignalWindow> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    SignalWindow win;
    win.source = {recording.subject_id, w * len};
    win.matrix = num::Tensor({channels, len});
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t t = 0; t < len; ++t) win.matrix(c, t) = recording.samples(c, w * len + t);
    const auto first = recording.labels.begin() + static_cast<std::ptrdiff_t>(w * len);
    win.label = std::any_of(first, first + static_cast<std::ptrdiff_t>(len),
                            [](std::uint8_t l) { return l != 0; })
                    ? 1
                    : 0;
    out.push_back(std::move(win));
  }
  return out;
}

std::vector<double> dft_magnitudes(std::span<const double> segment) {
  const std::size_t m = segment.size();
  if (m == 0) return {};
  const RealFft& fft = RealFft::for_length(m);
  std::vector<double> in(segment.begin(), segment.end());
  std::vector<fftw_complex> out(m / 2 + 1);
  fft.forward(in, out);
  std::vector<double> mags(m);
  for (std::size_t k = 0; k <= m / 2; ++k) mags[k] = std::hypot(out[k][0], out[k][1]);
  for (std::size_t k = m / 2 + 1; k < m; ++k) mags[k] = mags[m - k];
  return mags;
}

FeatureTensor featurize(const SignalWindow& window, std::size_t steps) {
  const std::size_t channels = window.channels();
  const std::size_t len = window.timepoints();
  if (steps == 0 || len % steps != 0) {
    throw ConfigError("featurize: " + std::to_string(len) + " timepoints are not divisible into " +
                      std::to_string(steps) + " steps");
  }
  const std::size_t m = len / steps;
  const std::size_t p = m / 2;
  if (p == 0) throw ConfigError("featurize: sub-segments of " + std::to_string(m) + " samples have no non-DC bins");

  const RealFft& fft = RealFft::for_length(m);
  std::vector<double> in(m);
  std::vector<fftw_complex> out(m / 2 + 1);

  FeatureTensor f;
  f.provenance = window.source;
  f.values = num::Tensor({steps, channels, p});
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t i = 0; i < m; ++i) in[i] = window.matrix(c, t * m + i);
      fft.forward(in, out);
      double* dst = f.values.values().data() + (t * channels + c) * p;
      for (std::size_t k = 1; k <= p; ++k) {
        dst[k - 1] = std::log(std::max(std::hypot(out[k][0], out[k][1]), kLogFloor));
      }
    }
  }
  return f;
}

void write_recording_csv(const std::filesystem::path& path, const Recording& rec) {
  rec.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "# subject=" << rec.subject_id << " fs=" << format_double(rec.sampling_rate_hz) << '\n';
  os << "t,label";
  for (const auto& name : rec.channel_names) os << ',' << name;
  os << '\n';
  for (std::size_t t = 0; t < rec.timepoints(); ++t) {
    os << format_double(static_cast<double>(t) / rec.sampling_rate_hz) << ','
       << static_cast<int>(rec.labels[t]);
    for (std::size_t c = 0; c < rec.channels(); ++c) os << ',' << format_double(rec.samples(c, t));
    os << '\n';
  }
  if (!os) throw IoError("failed writing " + path.string());
}

Recording read_recording_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::string line;
  Recording rec;

  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw IoError(path.string() + ": missing '# subject=<id> fs=<hz>' header");
  }
  {
    std::istringstream hs(line.substr(2));
    std::string token;
    bool have_fs = false;
    while (hs >> token) {
      if (token.rfind("subject=", 0) == 0) rec.subject_id = token.substr(8);
      if (token.rfind("fs=", 0) == 0) {
        rec.sampling_rate_hz = parse_double(token.substr(3), path, 1);
        have_fs = true;
      }
    }
    if (rec.subject_id.empty() || !have_fs) {
      throw IoError(path.string() + ": header must carry subject= and fs=");
    }
  }

  if (!std::getline(is, line)) throw IoError(path.string() + ": missing column header");
  auto cols = split_commas(line);
  if (cols.size() < 3 || cols[0] != "t" || cols[1] != "label") {
    throw IoError(path.string() + ": column header must start with t,label");
  }
  for (std::size_t i = 2; i < cols.size(); ++i) rec.channel_names.emplace_back(cols[i]);
  const std::size_t channels = rec.channel_names.size();

  std::vector<std::vector<double>> rows(channels);
  std::size_t lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_commas(line);
    if (fields.size() != channels + 2) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(channels + 2) + " fields, got " + std::to_string(fields.size()));
    }
    const double label = parse_double(fields[1], path, lineno);
    if (label != 0.0 && label != 1.0) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": label must be 0 or 1");
    }
    rec.labels.push_back(static_cast<std::uint8_t>(label));
    for (std::size_t c = 0; c < channels; ++c) rows[c].push_back(parse_double(fields[c + 2], path, lineno));
  }

  const std::size_t total = rec.labels.size();
  rec.samples = num::Tensor({channels, total});
  for (std::size_t c = 0; c < channels; ++c)
    std::copy(rows[c].begin(), rows[c].end(), rec.samples.values().begin() + static_cast<std::ptrdiff_t>(c * total));
  rec.validate();
  return rec;
}

std::vector<Recording> load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("corpus directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no recording CSV files in " + dir.string());
  std::vector<Recording> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_recording_csv(f));
  return out;
}

}  // namespace eegssl::signal
