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
#include <string>
#include <vector>

#include "rydstat/error.hpp"
#include "rydstat/format.hpp"

namespace rydstat {

struct BisectionOptions {
  double value_tolerance = 1e-10;
  int max_iterations = 200;
};

/// Solves f(x) = target for a strictly increasing f on [lo, hi] by bisection.
/// The caller guarantees f(lo) <= target <= f(hi). Converges when
/// |f(x) - target| < value_tolerance.
template <typename F>
double bisect_increasing(F&& f, double lo, double hi, double target,
                         BisectionOptions opts = {}) {
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double value = f(mid);
    if (std::abs(value - target) < opts.value_tolerance) return mid;
    if (!(mid > lo && mid < hi)) break;  // interval exhausted at double precision
    if (value < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw Error(ErrorCode::kNoConvergence,
              "bisection for target " + format_double(target) + " stalled in [" +
                  format_double(lo) + ", " + format_double(hi) + "]");
}

/// True when f never decreases across `points` evenly spaced samples of
/// [lo, hi] and ends above where it starts. Flat stretches are allowed since
/// saturating functions round to a constant in double precision.
template <typename F>
bool increasing_on_grid(F&& f, double lo, double hi, std::size_t points) {
  const double first = f(lo);
  double prev = first;
  for (std::size_t i = 1; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = f(x);
    if (!(v >= prev)) return false;
    prev = v;
  }
  return prev > first;
}

}  // namespace rydstat
