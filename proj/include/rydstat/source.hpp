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
#include <numeric>
#include <cstddef>
#include <string>
#include <vector>

#include "rydstat/error.hpp"
#include "rydstat/fock.hpp"
#include "rydstat/format.hpp"
#include "rydstat/roots.hpp"

namespace rydstat {

inline constexpr double kDefaultWriteTransmission = 0.21;

/// DLCZ source: a two-mode squeezed write/read state with excitation
/// probability p, heralded by a non-number-resolving write detector behind
/// transmission t_w.
struct SourceModel {
  double p = 0.0;
  double t_w = kDefaultWriteTransmission;

  void validate() const {
    if (!(p >= 0.0 && p < 1.0)) {
      throw Error(ErrorCode::kPOutOfRange, "p = " + format_double(p) + " outside [0, 1)");
    }
    if (!(t_w > 0.0 && t_w <= 1.0)) {
      throw Error(ErrorCode::kTransmissionOutOfRange,
                  "t_w = " + format_double(t_w) + " outside (0, 1]");
    }
  }
};

/// Joint (write, read) photon-number distribution. For the two-mode squeezed
/// state it is diagonal: P(n, n) = (1 - p) p^n.
class JointDistribution {
 public:
  JointDistribution(int n_max, std::vector<double> probs)
      : n_max_(n_max), probs_(std::move(probs)) {}

  int n_max() const { return n_max_; }
  double operator()(int n_write, int n_read) const {
    return probs_[static_cast<std::size_t>(n_write) * static_cast<std::size_t>(n_max_ + 1) +
                  static_cast<std::size_t>(n_read)];
  }

  FockDistribution read_marginal() const {
    std::vector<double> m(static_cast<std::size_t>(n_max_) + 1, 0.0);
    for (int w = 0; w <= n_max_; ++w) {
      for (int r = 0; r <= n_max_; ++r) m[static_cast<std::size_t>(r)] += (*this)(w, r);
    }
    return FockDistribution::normalized(std::move(m));
  }

 private:
  int n_max_;
  std::vector<double> probs_;
};

inline JointDistribution two_mode_joint(const SourceModel& m, int n_max = kDefaultNMax) {
  m.validate();
  check_n_max(n_max);
  const double tail = std::pow(m.p, n_max + 1);
  if (tail >= kTailTolerance) {
    throw Error(ErrorCode::kTruncationTooSmall,
                "two-mode state leaks " + format_double(tail) + " beyond n_max=" +
                    std::to_string(n_max));
  }
  const auto dim = static_cast<std::size_t>(n_max) + 1;
  std::vector<double> probs(dim * dim, 0.0);
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double w = (1.0 - m.p) * std::pow(m.p, n);
    probs[static_cast<std::size_t>(n) * dim + static_cast<std::size_t>(n)] = w;
    total += w;
  }
  for (double& x : probs) x /= total;
  return JointDistribution(n_max, std::move(probs));
}

/// Probability mass of the heralded read state above n_max, in closed form.
inline double conditional_read_tail(const SourceModel& m, int n_max) {
  const double p = m.p;
  const double miss = 1.0 - m.t_w;
  const double prefactor = (1.0 - p) * (1.0 - p * miss) / m.t_w;
  const double pn = std::pow(p, n_max);
  return prefactor * (pn / (1.0 - p) - miss * std::pow(p * miss, n_max) / (1.0 - p * miss));
}

/// Read-mode photon-number distribution conditioned on a write click:
/// p_n = (1 - p) t_w^-1 [1 - p (1 - t_w)] p^(n-1) [1 - (1 - t_w)^n], n >= 1.
inline FockDistribution conditional_read_state(const SourceModel& m,
                                               int n_max = kDefaultNMax) {
  m.validate();
  check_n_max(n_max);
  if (n_max < 1) {
    throw Error(ErrorCode::kTruncationTooSmall, "heralded state needs n_max >= 1");
  }
  const double tail = conditional_read_tail(m, n_max);
  if (tail >= kTailTolerance) {
    throw Error(ErrorCode::kTruncationTooSmall,
                "heralded state (p=" + format_double(m.p) + ") leaks " +
                    format_double(tail) + " beyond n_max=" + std::to_string(n_max));
  }
  const double miss = 1.0 - m.t_w;
  const double prefactor = (1.0 - m.p) * (1.0 - m.p * miss) / m.t_w;
  std::vector<double> probs(static_cast<std::size_t>(n_max) + 1, 0.0);
  double p_pow = 1.0;     // p^(n-1)
  double miss_pow = miss; // (1 - t_w)^n
  for (int n = 1; n <= n_max; ++n) {
    probs[static_cast<std::size_t>(n)] = prefactor * p_pow * (1.0 - miss_pow);
    p_pow *= m.p;
    miss_pow *= miss;
  }
  // The retained mass is 1 - tail analytically; renormalize over 0..n_max.
  const double kept = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(kept + tail - 1.0) > kNormTolerance) {
    throw Error(ErrorCode::kInvalidDistribution,
                "heralded state mass " + format_double(kept) + " inconsistent with tail " +
                    format_double(tail));
  }
  return FockDistribution::normalized(std::move(probs));
}

/// Largest p whose heralded state fits in n_max photons.
inline double max_representable_p(double t_w, int n_max) {
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (conditional_read_tail({mid, t_w}, n_max) < kTailTolerance) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

inline double heralded_g2(double p, double t_w, int n_max) {
  return g2(conditional_read_state({p, t_w}, n_max));
}

/// Recovers the excitation probability p from a measured heralded g2(0).
/// g2 is independent of linear loss and strictly increasing in p, so the
/// inversion is a bracketed bisection over p.
inline double infer_p_from_g2(double g2_target, double t_w = kDefaultWriteTransmission,
                              int n_max = kDefaultNMax) {
  SourceModel{0.0, t_w}.validate();
  constexpr double kLowP = 1e-12;
  const double p_hi = max_representable_p(t_w, n_max);
  const double g2_lo = heralded_g2(kLowP, t_w, n_max);
  const double g2_hi = heralded_g2(p_hi, t_w, n_max);
  if (!(g2_target >= g2_lo && g2_target <= g2_hi)) {
    throw Error(ErrorCode::kTargetOutOfRange,
                "g2 " + format_double(g2_target) + " outside attainable [" +
                    format_double(g2_lo) + ", " + format_double(g2_hi) + "] at n_max=" +
                    std::to_string(n_max));
  }
  return bisect_increasing([&](double p) { return heralded_g2(p, t_w, n_max); }, kLowP,
                           p_hi, g2_target);
}

/// Excitation probability from a detected write probability, p = (p_w - p_nw) / t_w.
inline double p_from_write_probability(double p_w, double t_w, double p_nw) {
  const double p = (p_w - p_nw) / t_w;
  if (!(p >= 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kPOutOfRange,
                "p_w = " + format_double(p_w) + " implies p = " + format_double(p));
  }
  return p;
}

/// Ideal write/read cross-correlation: 1 + 1/p, or 1/p when the read mode is
/// fully blockaded to a single photon.
inline double ideal_cross_correlation(double p, bool blockaded) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kPOutOfRange, "p = " + format_double(p) + " outside (0, 1)");
  }
  return blockaded ? 1.0 / p : 1.0 + 1.0 / p;
}

/// Literature reference curve 2p(2 + p) / (1 + p)^2 for the heralded g2.
inline double reference_g2_scaling(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kPOutOfRange, "p = " + format_double(p) + " outside [0, 1]");
  }
  return 2.0 * p * (2.0 + p) / ((1.0 + p) * (1.0 + p));
}

}  // namespace rydstat
