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

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rydstat {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed and a tuple of stream coordinates.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t c : coords) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

/// A seeded random stream. Streams for parallel work are obtained with
/// `RandomStream::derived(seed, {coords...})`, so the numbers consumed by a
/// work item depend only on its coordinates, never on which thread runs it.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  static RandomStream derived(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> coords) {
    return RandomStream(derive_seed(seed, coords));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi_exclusive) {
    const auto span = static_cast<std::uint64_t>(hi_exclusive - lo);
    return lo + static_cast<std::int64_t>(uniform() * static_cast<double>(span));
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::int64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(engine_);
  }

  std::int64_t binomial(std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::binomial_distribution<std::int64_t> dist(n, p);
    return dist(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rydstat
