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

#include <cmath>
#include <cstddef>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rydstat/error.hpp"
#include "rydstat/format.hpp"

namespace rydstat {

inline constexpr int kDefaultNMax = 20;
/// Largest probability mass allowed to fall outside the modeled space.
inline constexpr double kTailTolerance = 1e-9;
inline constexpr double kNormTolerance = 1e-9;

/// Photon-number distribution truncated at n_max: probs()[k] is the
/// probability of exactly k photons, k = 0..n_max. Always normalized.
class FockDistribution {
 public:
  /// Validates non-negativity and normalizes by the total weight.
  static FockDistribution normalized(std::vector<double> weights) {
    if (weights.empty()) {
      throw Error(ErrorCode::kInvalidDistribution, "empty probability vector");
    }
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(ErrorCode::kInvalidDistribution,
                    "negative or non-finite weight " + format_double(w));
      }
      total += w;
    }
    if (!(total > 0.0)) {
      throw Error(ErrorCode::kInvalidDistribution, "weights sum to zero");
    }
    for (double& w : weights) w /= total;
    return FockDistribution(std::move(weights));
  }

  /// Accepts an already normalized vector (sum within 1e-9 of one).
  static FockDistribution from_probs(std::vector<double> probs) {
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(total - 1.0) > kNormTolerance) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "probabilities sum to " + format_double(total));
    }
    return normalized(std::move(probs));
  }

  int n_max() const { return static_cast<int>(probs_.size()) - 1; }
  std::size_t size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t k) const { return probs_[k]; }
  double at(std::size_t k) const { return k < probs_.size() ? probs_[k] : 0.0; }

  friend bool operator==(const FockDistribution&, const FockDistribution&) = default;

 private:
  explicit FockDistribution(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

inline void check_n_max(int n_max) {
  if (n_max < 0) {
    throw Error(ErrorCode::kInvalidDistribution, "n_max must be non-negative");
  }
}

inline FockDistribution fock_state(int n, int n_max = kDefaultNMax) {
  check_n_max(n_max);
  if (n < 0 || n > n_max) {
    throw Error(ErrorCode::kNOutOfRange, "Fock state |" + std::to_string(n) +
                                             "> outside 0.." + std::to_string(n_max));
  }
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
  p[static_cast<std::size_t>(n)] = 1.0;
  return FockDistribution::normalized(std::move(p));
}

inline FockDistribution vacuum(int n_max = kDefaultNMax) { return fock_state(0, n_max); }

/// Poisson mass above n_max, summed term by term so it does not cancel
/// against the retained part.
inline double coherent_tail(double mu, int n_max) {
  double term = std::exp(-mu);
  for (int k = 1; k <= n_max; ++k) term *= mu / k;
  double tail = 0.0;
  for (int k = n_max + 1; k < n_max + 100000; ++k) {
    term *= mu / k;
    tail += term;
    if (term <= tail * 1e-17) break;
  }
  return tail;
}

/// Poisson distribution of a weak coherent state with mean photon number mu,
/// renormalized over 0..n_max.
inline FockDistribution coherent(double mu, int n_max = kDefaultNMax) {
  check_n_max(n_max);
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorCode::kNegativeMean, "mean photon number " + format_double(mu));
  }
  const double tail = coherent_tail(mu, n_max);
  if (tail >= kTailTolerance) {
    throw Error(ErrorCode::kTruncationTooSmall,
                "coherent(" + format_double(mu) + ") leaks " + format_double(tail) +
                    " beyond n_max=" + std::to_string(n_max));
  }
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
  // p_k = p_{k-1} mu / k keeps every term finite.
  double term = std::exp(-mu);
  for (int k = 0; k <= n_max; ++k) {
    if (k > 0) term *= mu / k;
    p[static_cast<std::size_t>(k)] = term;
  }
  return FockDistribution::normalized(std::move(p));
}

/// Largest mean photon number whose Poisson distribution fits in n_max.
inline double max_representable_mu(int n_max) {
  double lo = 0.0;
  double hi = 1.0;
  while (coherent_tail(hi, n_max) < kTailTolerance && hi < 1e6) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (coherent_tail(mid, n_max) < kTailTolerance) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

inline double mean_photons(const FockDistribution& d) {
  double mean = 0.0;
  for (std::size_t k = 1; k < d.size(); ++k) mean += static_cast<double>(k) * d[k];
  return mean;
}

/// Second factorial moment: sum of k(k-1) p_k.
inline double second_factorial_moment(const FockDistribution& d) {
  double m = 0.0;
  for (std::size_t k = 2; k < d.size(); ++k) {
    m += static_cast<double>(k) * static_cast<double>(k - 1) * d[k];
  }
  return m;
}

/// Zero-delay autocorrelation g2(0) = <k(k-1)> / <k>^2.
inline double g2(const FockDistribution& d) {
  const double mean = mean_photons(d);
  if (!(mean > 0.0)) {
    throw Error(ErrorCode::kZeroMean, "g2 is undefined for the vacuum");
  }
  return second_factorial_moment(d) / (mean * mean);
}

/// Multiphoton strength: P(n >= 2) / P(n >= 1).
inline double zeta(const FockDistribution& d) {
  double at_least_one = 0.0;
  double at_least_two = 0.0;
  for (std::size_t k = 1; k < d.size(); ++k) {
    at_least_one += d[k];
    if (k >= 2) at_least_two += d[k];
  }
  if (!(at_least_one > 0.0)) {
    throw Error(ErrorCode::kVacuumOnly, "zeta is undefined for the vacuum");
  }
  return at_least_two / at_least_one;
}

/// Probability of strictly more than `n` photons.
inline double tail_mass(const FockDistribution& d, int n) {
  double s = 0.0;
  for (std::size_t k = static_cast<std::size_t>(n) + 1; k < d.size(); ++k) s += d[k];
  return s;
}

inline void write_csv(std::ostream& out, const FockDistribution& d) {
  out << "k,prob\n";
  for (std::size_t k = 0; k < d.size(); ++k) {
    out << k << ',' << format_double(d[k]) << '\n';
  }
}

inline FockDistribution read_fock_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<double> probs;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header) {
      if (text != "k,prob") throw parse_error(line_no, "expected header 'k,prob'");
      header = true;
      continue;
    }
    const auto fields = split(text, ',');
    std::int64_t k = 0;
    double p = 0.0;
    if (fields.size() != 2 || !parse_int(fields[0], k) || !parse_double(fields[1], p)) {
      throw parse_error(line_no, "expected 'k,prob'");
    }
    if (k != static_cast<std::int64_t>(probs.size())) {
      throw parse_error(line_no, "photon numbers must be consecutive from 0");
    }
    probs.push_back(p);
  }
  if (!header) throw Error(ErrorCode::kEmptyFile, "no distribution data");
  return FockDistribution::from_probs(std::move(probs));
}

}  // namespace rydstat
