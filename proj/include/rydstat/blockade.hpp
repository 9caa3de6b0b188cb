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
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rydstat/error.hpp"
#include "rydstat/fock.hpp"
#include "rydstat/format.hpp"
#include "rydstat/parallel.hpp"
#include "rydstat/rng.hpp"
#include "rydstat/transfer.hpp"

namespace rydstat {

/// One-dimensional hard-sphere model of a blockaded cloud. Lengths in um.
struct BlockadeConfig {
  double cloud_length = 15.0;
  double blockade_radius = 10.5;
  std::int64_t trials_per_fock = 100000;
  std::uint64_t rng_seed = 1;
  int n_max = kDefaultNMax;

  void validate() const {
    if (!(cloud_length > 0.0) || !std::isfinite(cloud_length)) {
      throw Error(ErrorCode::kNonpositiveLength,
                  "cloud_length = " + format_double(cloud_length));
    }
    if (!(blockade_radius >= 0.0) || !std::isfinite(blockade_radius)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "blockade_radius = " + format_double(blockade_radius));
    }
    if (trials_per_fock < 1) {
      throw Error(ErrorCode::kInvalidConfig, "trials_per_fock must be >= 1");
    }
    if (n_max < 1 || n_max > kMaxMatrixNMax) {
      throw Error(ErrorCode::kInvalidConfig, "n_max = " + std::to_string(n_max));
    }
  }
};

/// Trials are split into fixed-size chunks; chunk c of input n draws from the
/// stream derived from (seed, n, c). Changing this constant changes results.
inline constexpr std::int64_t kTrialsPerChunk = 8192;

/// Distribution of the number of surviving polaritons for `input_n` photons.
struct SurvivalDistribution {
  int input_n = 0;
  std::int64_t trials = 0;  // 0 when computed analytically
  std::vector<std::int64_t> counts;
  std::vector<double> probs;

  /// Binomial standard error of probs[k]; zero for analytic columns.
  double standard_error(int k) const {
    if (trials == 0) return 0.0;
    const double q = probs[static_cast<std::size_t>(k)];
    return std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
  }

  friend bool operator==(const SurvivalDistribution&, const SurvivalDistribution&) = default;
};

namespace detail {

/// True once every point of [0, L) lies within r_b of a survivor, after
/// which no further photon can survive.
inline bool blockade_covers_cloud(const std::vector<double>& sorted_survivors, double r_b,
                                  double length) {
  if (sorted_survivors.empty()) return false;
  if (sorted_survivors.front() - r_b > 0.0) return false;
  if (sorted_survivors.back() + r_b < length) return false;
  for (std::size_t i = 1; i < sorted_survivors.size(); ++i) {
    if (sorted_survivors[i] - sorted_survivors[i - 1] > 2.0 * r_b) return false;
  }
  return true;
}

inline void run_chunk(const BlockadeConfig& cfg, int n, std::int64_t chunk,
                      std::vector<std::int64_t>& histogram) {
  const std::int64_t first = chunk * kTrialsPerChunk;
  const std::int64_t last = std::min(cfg.trials_per_fock, first + kTrialsPerChunk);
  auto rng = RandomStream::derived(cfg.rng_seed, {static_cast<std::uint64_t>(n),
                                                  static_cast<std::uint64_t>(chunk)});
  const double r_b = cfg.blockade_radius;
  std::vector<double> survivors;
  survivors.reserve(static_cast<std::size_t>(n));
  for (std::int64_t trial = first; trial < last; ++trial) {
    survivors.clear();
    // Photons arrive in draw order; a photon is scattered if it lies within
    // r_b of an earlier survivor. Scattered photons block nothing.
    for (int i = 0; i < n; ++i) {
      const double x = rng.uniform(0.0, cfg.cloud_length);
      // Survivors are kept sorted, so only the two neighbours of x matter.
      const auto right = std::upper_bound(survivors.begin(), survivors.end(), x);
      if (right != survivors.end() && *right - x <= r_b) continue;
      if (right != survivors.begin() && x - *(right - 1) <= r_b) continue;
      survivors.insert(right, x);
      if (blockade_covers_cloud(survivors, r_b, cfg.cloud_length)) break;
    }
    ++histogram[survivors.size()];
  }
}

}  // namespace detail

/// Monte Carlo survival statistics for an n-photon Fock input. Results depend
/// only on (config, n), not on the thread count.
inline SurvivalDistribution simulate_fock(const BlockadeConfig& cfg, int n,
                                          unsigned threads = 1) {
  cfg.validate();
  if (n < 0 || n > cfg.n_max) {
    throw Error(ErrorCode::kNOutOfRange,
                "n = " + std::to_string(n) + " outside 0.." + std::to_string(cfg.n_max));
  }
  SurvivalDistribution out;
  out.input_n = n;
  out.counts.assign(static_cast<std::size_t>(n) + 1, 0);
  out.probs.assign(static_cast<std::size_t>(n) + 1, 0.0);
  if (n <= 1) {
    // Nothing can block a lone photon.
    out.probs[static_cast<std::size_t>(n)] = 1.0;
    return out;
  }
  const std::int64_t chunks = (cfg.trials_per_fock + kTrialsPerChunk - 1) / kTrialsPerChunk;
  std::vector<std::vector<std::int64_t>> partial(
      static_cast<std::size_t>(chunks), std::vector<std::int64_t>(out.counts.size(), 0));
  parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t c) {
    detail::run_chunk(cfg, n, static_cast<std::int64_t>(c), partial[c]);
  });
  for (const auto& h : partial) {
    for (std::size_t k = 0; k < h.size(); ++k) out.counts[k] += h[k];
  }
  out.trials = cfg.trials_per_fock;
  for (std::size_t k = 0; k < out.counts.size(); ++k) {
    out.probs[k] = static_cast<double>(out.counts[k]) / static_cast<double>(out.trials);
  }
  return out;
}

inline std::vector<SurvivalDistribution> simulate_columns(const BlockadeConfig& cfg,
                                                          unsigned threads = 1) {
  cfg.validate();
  std::vector<SurvivalDistribution> cols;
  cols.reserve(static_cast<std::size_t>(cfg.n_max) + 1);
  for (int n = 0; n <= cfg.n_max; ++n) cols.push_back(simulate_fock(cfg, n, threads));
  return cols;
}

inline TransferMatrix matrix_from_survival(const std::vector<SurvivalDistribution>& cols) {
  std::vector<std::vector<double>> columns;
  columns.reserve(cols.size());
  for (const auto& c : cols) columns.push_back(c.probs);
  return TransferMatrix::from_columns(columns);
}

/// Blockade transfer matrix: column n holds the survivor distribution of |n>.
inline TransferMatrix blockade_matrix(const BlockadeConfig& cfg, unsigned threads = 1) {
  return matrix_from_survival(simulate_columns(cfg, threads));
}

/// Probability that both of two uniformly placed photons survive, i.e. that
/// they are more than r_b apart: (1 - r_b / L)^2 for r_b <= L.
inline double exact_pair_survival(double r_b, double length) {
  if (!(length > 0.0)) {
    throw Error(ErrorCode::kNonpositiveLength, "L = " + format_double(length));
  }
  if (!(r_b >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "r_b = " + format_double(r_b));
  }
  if (r_b >= length) return 0.0;
  const double x = 1.0 - r_b / length;
  return x * x;
}

/// Effective model for propagation without storage: the cloud is stretched by
/// `medium_scale` to match the pulse length, weakening the nonlinearity.
inline BlockadeConfig slow_light_config(BlockadeConfig cfg, double medium_scale) {
  if (!(medium_scale >= 1.0) || !std::isfinite(medium_scale)) {
    throw Error(ErrorCode::kScaleOutOfRange,
                "medium_scale = " + format_double(medium_scale) + " must be >= 1");
  }
  cfg.cloud_length *= medium_scale;
  return cfg;
}

inline TransferMatrix slow_light_matrix(const BlockadeConfig& cfg, double medium_scale,
                                        unsigned threads = 1) {
  return blockade_matrix(slow_light_config(cfg, medium_scale), threads);
}

}  // namespace rydstat
