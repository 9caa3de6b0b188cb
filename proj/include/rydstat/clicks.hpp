// Copyright 2026 The rydstat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "rydstat/error.hpp"
#include "rydstat/fock.hpp"
#include "rydstat/format.hpp"
#include "rydstat/parallel.hpp"
#include "rydstat/rng.hpp"

namespace rydstat {

/// D1 is the herald (write) detector; D2 and D3 sit behind the HBT beamsplitter.
enum class Detector : std::uint8_t { kD1 = 0, kD2 = 1, kD3 = 2 };
inline constexpr int kNumDetectors = 3;

inline std::string detector_name(Detector d) {
  return "D" + std::to_string(static_cast<int>(d) + 1);
}

struct ClickRecord {
  std::int64_t trial_id = 0;
  Detector detector = Detector::kD2;
  std::int64_t time_ns = 0;

  friend bool operator==(const ClickRecord&, const ClickRecord&) = default;
  friend bool operator<(const ClickRecord& a, const ClickRecord& b) {
    return std::tie(a.trial_id, a.time_ns, a.detector) <
           std::tie(b.trial_id, b.time_ns, b.detector);
  }
};

/// Half-open time interval [start_ns, end_ns) relative to trial start.
struct Window {
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;

  std::int64_t length() const { return end_ns - start_ns; }
  bool contains(std::int64_t t) const { return t >= start_ns && t < end_ns; }
  bool overlaps(const Window& o) const { return start_ns < o.end_ns && o.start_ns < end_ns; }
};

/// Expected background clicks in window `w` for a detector with a steady
/// rate of `rate_hz` counts per second.
inline double clicks_per_window(double rate_hz, const Window& w) {
  return rate_hz * static_cast<double>(w.length()) * 1e-9;
}

/// Signal window per detector and a shared noise window placed after the
/// retrieved pulse, where only background clicks are expected.
struct WindowSpec {
  std::array<Window, kNumDetectors> signal{{{0, 300}, {0, 300}, {0, 300}}};
  Window noise{400, 1000};

  static WindowSpec uniform(Window signal, Window noise) {
    WindowSpec w;
    w.signal.fill(signal);
    w.noise = noise;
    return w;
  }

  const Window& signal_of(Detector d) const { return signal[static_cast<std::size_t>(d)]; }

  void validate() const {
    if (noise.length() <= 0) {
      throw Error(ErrorCode::kOverlappingWindows, "noise window must have end > start");
    }
    for (int d = 0; d < kNumDetectors; ++d) {
      const auto& s = signal[static_cast<std::size_t>(d)];
      if (s.length() <= 0) {
        throw Error(ErrorCode::kOverlappingWindows,
                    "signal window of " + detector_name(static_cast<Detector>(d)) +
                        " must have end > start");
      }
      if (s.start_ns < 0 || noise.start_ns < 0) {
        throw Error(ErrorCode::kOverlappingWindows, "windows must start at t >= 0");
      }
      if (s.overlaps(noise)) {
        throw Error(ErrorCode::kOverlappingWindows,
                    "noise window overlaps the signal window of " +
                        detector_name(static_cast<Detector>(d)));
      }
    }
  }

  /// Factor converting noise-window clicks into signal-window clicks.
  double noise_scale(Detector d) const {
    return static_cast<double>(signal_of(d).length()) / static_cast<double>(noise.length());
  }
};

/// Bit set of detectors whose clicks are merged into one channel.
class DetectorSet {
 public:
  constexpr DetectorSet() = default;
  constexpr DetectorSet(std::initializer_list<Detector> ds) {
    for (auto d : ds) bits_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(d));
  }
  constexpr bool contains(Detector d) const {
    return (bits_ >> static_cast<unsigned>(d)) & 1u;
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool disjoint(DetectorSet o) const { return (bits_ & o.bits_) == 0; }
  std::string name() const {
    std::string s;
    for (int d = 0; d < kNumDetectors; ++d) {
      if (contains(static_cast<Detector>(d))) {
        if (!s.empty()) s += '+';
        s += detector_name(static_cast<Detector>(d));
      }
    }
    return s;
  }
  friend constexpr bool operator==(DetectorSet, DetectorSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

/// The two channels correlated by an estimator. {D2},{D3} gives the HBT
/// autocorrelation; {D1},{D2,D3} the write/read cross-correlation.
struct DetectorPair {
  DetectorSet first{Detector::kD2};
  DetectorSet second{Detector::kD3};

  static DetectorPair hbt() { return {}; }
  static DetectorPair herald_read() {
    return {DetectorSet{Detector::kD1}, DetectorSet{Detector::kD2, Detector::kD3}};
  }

  void validate() const {
    if (first.empty() || second.empty() || !first.disjoint(second)) {
      throw Error(ErrorCode::kInvalidConfig, "detector channels must be non-empty and disjoint");
    }
  }
};

/// Aggregated counts for one detector pair. n1, n2 are per-trial click
/// probabilities (a channel clicks at most once per trial), n12 the number of
/// trials with a click on both channels, nn1, nn2 the per-trial noise
/// expected inside the signal windows.
struct TrialCounts {
  std::int64_t N = 0;
  double n1 = 0.0;
  double n2 = 0.0;
  std::int64_t n12 = 0;
  double nn1 = 0.0;
  double nn2 = 0.0;

  friend bool operator==(const TrialCounts&, const TrialCounts&) = default;
};

/// What a single trial contributed: signal clicks per channel and the raw
/// noise-window clicks per detector.
struct TrialSignature {
  bool first = false;
  bool second = false;
  std::array<std::int32_t, kNumDetectors> noise{};

  friend auto operator<=>(const TrialSignature&, const TrialSignature&) = default;
};

/// Per-trial data reduced to a histogram of trial signatures. Resampling
/// trials is equivalent to resampling this histogram multinomially.
struct TrialTable {
  std::int64_t n_trials = 0;
  WindowSpec windows;
  DetectorPair pair;
  std::map<TrialSignature, std::int64_t> histogram;

  friend bool operator==(const TrialTable& a, const TrialTable& b) {
    return a.n_trials == b.n_trials && a.histogram == b.histogram;
  }
};

inline double noise_per_trial(const WindowSpec& w, DetectorSet set,
                              const std::array<std::int64_t, kNumDetectors>& noise_clicks,
                              std::int64_t n_trials) {
  double nn = 0.0;
  for (int d = 0; d < kNumDetectors; ++d) {
    const auto det = static_cast<Detector>(d);
    if (set.contains(det)) {
      nn += static_cast<double>(noise_clicks[static_cast<std::size_t>(d)]) * w.noise_scale(det);
    }
  }
  return nn / static_cast<double>(n_trials);
}

/// Counts from a histogram whose categories are weighted by `weights`
/// (the observed histogram, or a bootstrap resample of it).
inline TrialCounts counts_from(const TrialTable& table,
                               const std::vector<std::int64_t>& weights) {
  TrialCounts c;
  std::int64_t n = 0;
  std::int64_t s1 = 0;
  std::int64_t s2 = 0;
  std::array<std::int64_t, kNumDetectors> noise{};
  std::size_t i = 0;
  for (const auto& [sig, _] : table.histogram) {
    const std::int64_t w = weights[i++];
    n += w;
    if (sig.first) s1 += w;
    if (sig.second) s2 += w;
    if (sig.first && sig.second) c.n12 += w;
    for (std::size_t d = 0; d < noise.size(); ++d) noise[d] += w * sig.noise[d];
  }
  c.N = n;
  if (n > 0) {
    c.n1 = static_cast<double>(s1) / static_cast<double>(n);
    c.n2 = static_cast<double>(s2) / static_cast<double>(n);
    c.nn1 = noise_per_trial(table.windows, table.pair.first, noise, n);
    c.nn2 = noise_per_trial(table.windows, table.pair.second, noise, n);
  }
  return c;
}

inline TrialCounts counts(const TrialTable& table) {
  std::vector<std::int64_t> weights;
  weights.reserve(table.histogram.size());
  for (const auto& [_, w] : table.histogram) weights.push_back(w);
  return counts_from(table, weights);
}

/// A run of trials with its time-tagged clicks, sorted by trial then time.
struct ClickStream {
  std::int64_t n_trials = 0;
  std::vector<ClickRecord> clicks;

  friend bool operator==(const ClickStream&, const ClickStream&) = default;
};

/// Reduces clicks to per-trial signatures. Clicks outside every window are
/// ignored; trials without clicks count as empty.
inline TrialTable aggregate(const ClickStream& stream, const WindowSpec& windows,
                            DetectorPair pair = DetectorPair::hbt()) {
  windows.validate();
  pair.validate();
  TrialTable table;
  table.n_trials = stream.n_trials;
  table.windows = windows;
  table.pair = pair;
  std::vector<ClickRecord> clicks = stream.clicks;
  std::stable_sort(clicks.begin(), clicks.end(),
                   [](const ClickRecord& a, const ClickRecord& b) { return a.trial_id < b.trial_id; });
  std::int64_t seen = 0;
  for (std::size_t i = 0; i < clicks.size();) {
    const std::int64_t trial = clicks[i].trial_id;
    TrialSignature sig;
    for (; i < clicks.size() && clicks[i].trial_id == trial; ++i) {
      const auto& c = clicks[i];
      if (windows.signal_of(c.detector).contains(c.time_ns)) {
        if (pair.first.contains(c.detector)) sig.first = true;
        if (pair.second.contains(c.detector)) sig.second = true;
      }
      if (windows.noise.contains(c.time_ns)) ++sig.noise[static_cast<std::size_t>(c.detector)];
    }
    ++table.histogram[sig];
    ++seen;
  }
  if (stream.n_trials - seen > 0) table.histogram[TrialSignature{}] += stream.n_trials - seen;
  return table;
}

inline void write_clicks(std::ostream& out, const ClickStream& stream) {
  out << "# trials=" << stream.n_trials << '\n';
  out << "trial_id,detector,time_ns\n";
  for (const auto& c : stream.clicks) {
    out << c.trial_id << ',' << detector_name(c.detector) << ',' << c.time_ns << '\n';
  }
}

inline ClickStream read_clicks(std::istream& in) {
  ClickStream stream;
  std::string line;
  std::size_t line_no = 0;
  bool any_content = false;
  bool have_trials = false;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    any_content = true;
    if (text.front() == '#') {
      auto body = trim(text.substr(1));
      constexpr std::string_view kKey = "trials=";
      if (body.substr(0, kKey.size()) == kKey) {
        if (!parse_int(body.substr(kKey.size()), stream.n_trials) || stream.n_trials < 0) {
          throw parse_error(line_no, "bad trial count");
        }
        have_trials = true;
      }
      continue;
    }
    if (!have_header) {
      if (text != "trial_id,detector,time_ns") {
        throw parse_error(line_no, "expected header 'trial_id,detector,time_ns'");
      }
      have_header = true;
      continue;
    }
    if (!have_trials) throw parse_error(line_no, "missing '# trials=N' line before data");
    const auto fields = split(text, ',');
    ClickRecord rec;
    if (fields.size() != 3) throw parse_error(line_no, "expected 3 fields");
    if (!parse_int(fields[0], rec.trial_id) || rec.trial_id < 0 ||
        rec.trial_id >= stream.n_trials) {
      throw parse_error(line_no, "trial_id must be in [0, trials)");
    }
    auto det = fields[1];
    if (!det.empty() && (det.front() == 'D' || det.front() == 'd')) det.remove_prefix(1);
    std::int64_t det_index = 0;
    if (!parse_int(det, det_index) || det_index < 1 || det_index > kNumDetectors) {
      throw parse_error(line_no, "detector must be D1, D2 or D3");
    }
    rec.detector = static_cast<Detector>(det_index - 1);
    if (!parse_int(fields[2], rec.time_ns) || rec.time_ns < 0) {
      throw parse_error(line_no, "time_ns must be a non-negative integer");
    }
    stream.clicks.push_back(rec);
  }
  if (!any_content) throw Error(ErrorCode::kEmptyFile, "click file is empty");
  if (!have_trials) throw parse_error(line_no, "missing '# trials=N' line");
  if (!have_header) throw parse_error(line_no, "missing header 'trial_id,detector,time_ns'");
  return stream;
}

inline TrialTable ingest_trials(std::istream& in, const WindowSpec& windows,
                                DetectorPair pair = DetectorPair::hbt()) {
  windows.validate();
  return aggregate(read_clicks(in), windows, pair);
}

inline TrialCounts ingest(std::istream& in, const WindowSpec& windows,
                          DetectorPair pair = DetectorPair::hbt()) {
  return counts(ingest_trials(in, windows, pair));
}

/// Directly measured autocorrelation n12 / (N n1 n2).
inline double g2_raw(const TrialCounts& c) {
  if (c.N <= 0 || !(c.n1 > 0.0) || !(c.n2 > 0.0)) {
    throw Error(ErrorCode::kZeroSingles, "no singles on one of the channels");
  }
  return static_cast<double>(c.n12) / (static_cast<double>(c.N) * c.n1 * c.n2);
}

/// Autocorrelation corrected for background clicks uncorrelated with the
/// signal.
inline double g2_noise_corrected(const TrialCounts& c) {
  const double raw = g2_raw(c);
  if (!(c.n1 > c.nn1) || !(c.n2 > c.nn2)) {
    throw Error(ErrorCode::kNoiseExceedsSignal,
                "noise " + format_double(c.nn1) + "/" + format_double(c.nn2) +
                    " not below signal " + format_double(c.n1) + "/" + format_double(c.n2));
  }
  const double s1 = c.n1 - c.nn1;
  const double s2 = c.n2 - c.nn2;
  const double bracket = c.nn1 / s1 + c.nn2 / s2 + c.nn1 * c.nn2 / (s1 * s2);
  return raw - (1.0 - raw) * bracket;
}

/// Write/read cross-correlation p_wr / (p_w p_r) from herald/read counts.
inline double cross_correlation(const TrialCounts& c) {
  if (c.N <= 0 || !(c.n1 > 0.0) || !(c.n2 > 0.0)) {
    throw Error(ErrorCode::kZeroSingles, "no write or read singles");
  }
  const double p_wr = static_cast<double>(c.n12) / static_cast<double>(c.N);
  return p_wr / (c.n1 * c.n2);
}

/// Source of synthetic click streams: photon numbers drawn from `source`,
/// each photon detected with `detection_efficiency` and routed 50/50 to D2 or
/// D3. Detectors are not number resolving, so a detector hit by several
/// photons clicks once. Background clicks are Poissonian with mean
/// `noise_per_trial[d]` inside detector d's signal window, at the same rate
/// in the noise window.
struct SynthesisModel {
  FockDistribution source = vacuum();
  std::array<double, kNumDetectors> noise_per_trial{};
  double detection_efficiency = 1.0;
  WindowSpec windows;
  std::uint64_t seed = 1;
};

inline constexpr std::int64_t kSynthesisChunk = 16384;

inline ClickStream synthesize(const SynthesisModel& model, std::int64_t n_trials,
                              unsigned threads = 1) {
  model.windows.validate();
  if (n_trials < 0) throw Error(ErrorCode::kInvalidConfig, "n_trials must be >= 0");
  if (!(model.detection_efficiency >= 0.0 && model.detection_efficiency <= 1.0)) {
    throw Error(ErrorCode::kInvalidProbability, "detection efficiency outside [0, 1]");
  }
  for (double nn : model.noise_per_trial) {
    if (!(nn >= 0.0) || !std::isfinite(nn)) {
      throw Error(ErrorCode::kInvalidConfig, "noise rates must be non-negative");
    }
  }
  std::vector<double> cdf;
  double acc = 0.0;
  for (double p : model.source.probs()) cdf.push_back(acc += p);

  const std::int64_t chunks = (n_trials + kSynthesisChunk - 1) / kSynthesisChunk;
  std::vector<std::vector<ClickRecord>> parts(static_cast<std::size_t>(chunks));
  parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t c) {
    auto rng = RandomStream::derived(model.seed, {0x53594eULL, c});
    auto& out = parts[c];
    const auto first = static_cast<std::int64_t>(c) * kSynthesisChunk;
    const auto last = std::min(n_trials, first + kSynthesisChunk);
    auto click_at = [&](std::int64_t trial, Detector d, const Window& w) {
      out.push_back({trial, d, rng.uniform_int(w.start_ns, w.end_ns)});
    };
    for (std::int64_t trial = first; trial < last; ++trial) {
      const std::size_t begin = out.size();
      const double u = rng.uniform();
      const auto k = static_cast<std::int64_t>(
          std::min<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(),
                                cdf.size() - 1));
      const std::int64_t detected = rng.binomial(k, model.detection_efficiency);
      const std::int64_t to_d2 = rng.binomial(detected, 0.5);
      if (to_d2 > 0) click_at(trial, Detector::kD2, model.windows.signal_of(Detector::kD2));
      if (detected - to_d2 > 0) {
        click_at(trial, Detector::kD3, model.windows.signal_of(Detector::kD3));
      }
      for (int d = 0; d < kNumDetectors; ++d) {
        const auto det = static_cast<Detector>(d);
        const double nn = model.noise_per_trial[static_cast<std::size_t>(d)];
        if (nn <= 0.0) continue;
        for (auto i = rng.poisson(nn); i > 0; --i) {
          click_at(trial, det, model.windows.signal_of(det));
        }
        for (auto i = rng.poisson(nn / model.windows.noise_scale(det)); i > 0; --i) {
          click_at(trial, det, model.windows.noise);
        }
      }
      std::sort(out.begin() + static_cast<std::ptrdiff_t>(begin), out.end());
    }
  });
  ClickStream stream;
  stream.n_trials = n_trials;
  for (auto& part : parts) stream.clicks.insert(stream.clicks.end(), part.begin(), part.end());
  return stream;
}

enum class G2Estimator { kRaw, kNoiseCorrected, kCrossCorrelation };

inline double estimate(const TrialCounts& c, G2Estimator which) {
  switch (which) {
    case G2Estimator::kRaw: return g2_raw(c);
    case G2Estimator::kNoiseCorrected: return g2_noise_corrected(c);
    case G2Estimator::kCrossCorrelation: return cross_correlation(c);
  }
  return g2_raw(c);
}

struct BootstrapResult {
  double std_error = 0.0;
  double mean = 0.0;
  int valid_resamples = 0;
};

inline constexpr int kDefaultResamples = 1000;

/// Nonparametric bootstrap over trials. Resample i draws its trial
/// multiplicities from the stream derived from (seed, i); resamples for which
/// the estimator is undefined are skipped.
inline BootstrapResult bootstrap_error(const TrialTable& table, G2Estimator which,
                                       int resamples = kDefaultResamples,
                                       std::uint64_t seed = 1, unsigned threads = 1) {
  if (table.n_trials < 10) {
    throw Error(ErrorCode::kInsufficientTrials,
                "bootstrap needs at least 10 trials, got " + std::to_string(table.n_trials));
  }
  if (resamples < 100) {
    throw Error(ErrorCode::kInvalidConfig, "bootstrap needs at least 100 resamples");
  }
  std::vector<double> base;
  for (const auto& [_, w] : table.histogram) {
    base.push_back(static_cast<double>(w) / static_cast<double>(table.n_trials));
  }
  std::vector<double> values(static_cast<std::size_t>(resamples),
                             std::numeric_limits<double>::quiet_NaN());
  parallel_for(values.size(), threads, [&](std::size_t i) {
    auto rng = RandomStream::derived(seed, {0x424f4fULL, i});
    std::vector<std::int64_t> weights(base.size(), 0);
    std::int64_t remaining = table.n_trials;
    double mass = 1.0;
    for (std::size_t j = 0; j < base.size() && remaining > 0; ++j) {
      if (j + 1 == base.size()) {
        weights[j] = remaining;
        break;
      }
      const double q = std::clamp(base[j] / mass, 0.0, 1.0);
      weights[j] = rng.binomial(remaining, q);
      remaining -= weights[j];
      mass -= base[j];
    }
    try {
      values[i] = estimate(counts_from(table, weights), which);
    } catch (const Error&) {
      // undefined for this resample
    }
  });
  std::vector<double> ok;
  for (double v : values) {
    if (std::isfinite(v)) ok.push_back(v);
  }
  if (ok.size() < values.size() / 2) {
    throw Error(ErrorCode::kInsufficientTrials,
                "estimator undefined in most bootstrap resamples");
  }
  BootstrapResult r;
  r.valid_resamples = static_cast<int>(ok.size());
  double sum = 0.0;
  for (double v : ok) sum += v;
  r.mean = sum / static_cast<double>(ok.size());
  const auto [lo, hi] = std::minmax_element(ok.begin(), ok.end());
  if (*lo == *hi) {
    r.mean = *lo;
    return r;
  }
  double ss = 0.0;
  for (double v : ok) ss += (v - r.mean) * (v - r.mean);
  r.std_error = std::sqrt(ss / static_cast<double>(ok.size() - 1));
  return r;
}

}  // namespace rydstat
