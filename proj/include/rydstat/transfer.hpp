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
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rydstat/error.hpp"
#include "rydstat/fock.hpp"
#include "rydstat/format.hpp"

namespace rydstat {

inline constexpr double kColumnSumTolerance = 1e-12;
inline constexpr double kMaxConditionNumber = 1e12;
inline constexpr int kMaxMatrixNMax = 1000;

class TransferMatrix;
inline TransferMatrix loss_matrix(double t, int n_max = kDefaultNMax);
inline TransferMatrix compose(const TransferMatrix& m2, const TransferMatrix& m1);
inline TransferMatrix invert(const TransferMatrix& m);

/// Square map on photon-number distributions: entry (k, l) is the
/// probability that l input photons leave as k photons. Physical matrices are
/// column-stochastic with non-negative entries. Inverses produced by
/// `invert` are flagged non-physical and may hold negative entries.
class TransferMatrix {
 public:
  static TransferMatrix identity(int n_max) {
    TransferMatrix m(n_max);
    for (int k = 0; k <= n_max; ++k) m(k, k) = 1.0;
    return m;
  }

  /// Builds a physical matrix from columns; column l may be shorter than
  /// n_max + 1 and is zero-padded. Each column must sum to one.
  static TransferMatrix from_columns(const std::vector<std::vector<double>>& columns) {
    if (columns.empty()) {
      throw Error(ErrorCode::kDimensionMismatch, "transfer matrix needs columns");
    }
    const int n_max = static_cast<int>(columns.size()) - 1;
    TransferMatrix m(n_max);
    for (int l = 0; l <= n_max; ++l) {
      const auto& col = columns[static_cast<std::size_t>(l)];
      if (col.size() > columns.size()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "column " + std::to_string(l) + " longer than the matrix");
      }
      for (std::size_t k = 0; k < col.size(); ++k) m(static_cast<int>(k), l) = col[k];
    }
    m.validate_physical();
    return m;
  }

  int n_max() const { return n_max_; }
  int dim() const { return n_max_ + 1; }
  bool physical() const { return physical_; }

  double operator()(int k, int l) const { return entries_[index(k, l)]; }
  double& operator()(int k, int l) { return entries_[index(k, l)]; }

  double column_sum(int l) const {
    double s = 0.0;
    for (int k = 0; k <= n_max_; ++k) s += (*this)(k, l);
    return s;
  }

  bool upper_triangular() const {
    for (int k = 1; k <= n_max_; ++k) {
      for (int l = 0; l < k; ++l) {
        if ((*this)(k, l) != 0.0) return false;
      }
    }
    return true;
  }

  friend bool operator==(const TransferMatrix&, const TransferMatrix&) = default;

 private:
  explicit TransferMatrix(int n_max, bool physical = true)
      : n_max_(n_max),
        physical_(physical),
        entries_(static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(n_max + 1),
                 0.0) {
    if (n_max < 0 || n_max > kMaxMatrixNMax) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "n_max " + std::to_string(n_max) + " outside 0.." +
                      std::to_string(kMaxMatrixNMax));
    }
  }

  std::size_t index(int k, int l) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(n_max_ + 1) +
           static_cast<std::size_t>(l);
  }

  void validate_physical() const {
    for (int l = 0; l <= n_max_; ++l) {
      for (int k = 0; k <= n_max_; ++k) {
        if (!((*this)(k, l) >= 0.0)) {
          throw Error(ErrorCode::kInvalidDistribution,
                      "negative entry in column " + std::to_string(l));
        }
      }
      if (std::abs(column_sum(l) - 1.0) > kColumnSumTolerance) {
        throw Error(ErrorCode::kInvalidDistribution,
                    "column " + std::to_string(l) + " sums to " +
                        format_double(column_sum(l)));
      }
    }
  }

  friend TransferMatrix loss_matrix(double, int);
  friend TransferMatrix compose(const TransferMatrix&, const TransferMatrix&);
  friend TransferMatrix invert(const TransferMatrix&);

  int n_max_;
  bool physical_;
  std::vector<double> entries_;
};

/// Binomial thinning: each photon is transmitted independently with
/// probability t, so entry (k, l) = C(l, k) t^k (1 - t)^(l - k).
inline TransferMatrix loss_matrix(double t, int n_max) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::kTransmissionOutOfRange, "transmission " + format_double(t));
  }
  TransferMatrix m(n_max);
  for (int l = 0; l <= n_max; ++l) {
    double binom = 1.0;  // C(l, k), advanced multiplicatively
    for (int k = 0; k <= l; ++k) {
      if (k > 0) binom = binom * static_cast<double>(l - k + 1) / static_cast<double>(k);
      m(k, l) = binom * std::pow(t, k) * std::pow(1.0 - t, l - k);
    }
  }
  return m;
}

/// Ideal single-photon filter: every non-vacuum input leaves as one photon.
inline TransferMatrix perfect_filter_matrix(int n_max = kDefaultNMax) {
  if (n_max < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "perfect filter needs n_max >= 1");
  }
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(n_max) + 1);
  cols[0] = {1.0};
  for (int l = 1; l <= n_max; ++l) cols[static_cast<std::size_t>(l)] = {0.0, 1.0};
  return TransferMatrix::from_columns(cols);
}

inline void check_same_size(int a, int b) {
  if (a != b) {
    throw Error(ErrorCode::kDimensionMismatch,
                "n_max " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

inline std::vector<double> apply_raw(const TransferMatrix& m, std::span<const double> p) {
  check_same_size(m.n_max(), static_cast<int>(p.size()) - 1);
  std::vector<double> out(p.size(), 0.0);
  for (int k = 0; k <= m.n_max(); ++k) {
    double s = 0.0;
    for (int l = 0; l <= m.n_max(); ++l) s += m(k, l) * p[static_cast<std::size_t>(l)];
    out[static_cast<std::size_t>(k)] = s;
  }
  return out;
}

/// p'_k = sum_l M_kl p_l. For non-physical (inverted) matrices the result is
/// accepted only if it is a distribution up to rounding; entries above -1e-9
/// are clipped to zero.
inline FockDistribution apply(const TransferMatrix& m, const FockDistribution& d) {
  auto out = apply_raw(m, d.probs());
  if (!m.physical()) {
    for (double& x : out) {
      if (x < -kNormTolerance) {
        throw Error(ErrorCode::kInvalidDistribution,
                    "back-propagated state has negative probability " + format_double(x));
      }
      x = std::max(x, 0.0);
    }
  }
  double total = 0.0;
  for (double x : out) total += x;
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw Error(ErrorCode::kInvalidDistribution,
                "result sums to " + format_double(total));
  }
  return FockDistribution::normalized(std::move(out));
}

/// Matrix product m2 * m1: m1 acts first.
inline TransferMatrix compose(const TransferMatrix& m2, const TransferMatrix& m1) {
  check_same_size(m2.n_max(), m1.n_max());
  TransferMatrix out(m1.n_max(), m1.physical() && m2.physical());
  const int n = m1.dim();
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const double a = m2(k, j);
      if (a == 0.0) continue;
      for (int l = 0; l < n; ++l) out(k, l) += a * m1(j, l);
    }
  }
  return out;
}

inline double norm_1(const TransferMatrix& m) {
  double best = 0.0;
  for (int l = 0; l <= m.n_max(); ++l) {
    double s = 0.0;
    for (int k = 0; k <= m.n_max(); ++k) s += std::abs(m(k, l));
    best = std::max(best, s);
  }
  return best;
}

/// Inverse by LU decomposition with partial pivoting. Throws SINGULAR_MATRIX
/// on a vanishing pivot and ILL_CONDITIONED when the 1-norm condition number
/// exceeds 1e12. The result is flagged non-physical.
inline TransferMatrix invert(const TransferMatrix& m) {
  const int n = m.dim();
  const auto un = static_cast<std::size_t>(n);
  std::vector<double> lu(un * un);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) lu[static_cast<std::size_t>(k) * un + static_cast<std::size_t>(l)] = m(k, l);
  }
  auto at = [&](int r, int c) -> double& {
    return lu[static_cast<std::size_t>(r) * un + static_cast<std::size_t>(c)];
  };
  std::vector<int> perm(un);
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;

  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(at(r, c)) > std::abs(at(pivot, c))) pivot = r;
    }
    // Tiny but nonzero pivots are left to the condition-number check.
    if (!(std::abs(at(pivot, c)) > 0.0)) {
      throw Error(ErrorCode::kSingularMatrix,
                  "zero pivot in column " + std::to_string(c));
    }
    if (pivot != c) {
      for (int j = 0; j < n; ++j) std::swap(at(c, j), at(pivot, j));
      std::swap(perm[static_cast<std::size_t>(c)], perm[static_cast<std::size_t>(pivot)]);
    }
    for (int r = c + 1; r < n; ++r) {
      const double f = at(r, c) / at(c, c);
      at(r, c) = f;
      if (f == 0.0) continue;
      for (int j = c + 1; j < n; ++j) at(r, j) -= f * at(c, j);
    }
  }

  TransferMatrix inv(m.n_max(), false);
  std::vector<double> x(un);
  for (int col = 0; col < n; ++col) {
    // Solve L U x = P e_col.
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = perm[static_cast<std::size_t>(i)] == col ? 1.0 : 0.0;
    for (int i = 0; i < n; ++i) {
      double s = x[static_cast<std::size_t>(i)];
      for (int j = 0; j < i; ++j) s -= at(i, j) * x[static_cast<std::size_t>(j)];
      x[static_cast<std::size_t>(i)] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = x[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < n; ++j) s -= at(i, j) * x[static_cast<std::size_t>(j)];
      x[static_cast<std::size_t>(i)] = s / at(i, i);
    }
    for (int i = 0; i < n; ++i) inv(i, col) = x[static_cast<std::size_t>(i)];
  }

  const double condition = norm_1(m) * norm_1(inv);
  if (std::isnan(condition)) throw Error(ErrorCode::kSingularMatrix, "non-finite inverse");
  if (!(condition <= kMaxConditionNumber)) {
    throw Error(ErrorCode::kIllConditioned,
                "condition number " + format_double(condition));
  }
  return inv;
}

inline void write_csv(std::ostream& out, const TransferMatrix& m) {
  out << "k\\l";
  for (int l = 0; l <= m.n_max(); ++l) out << ',' << l;
  out << '\n';
  for (int k = 0; k <= m.n_max(); ++k) {
    out << k;
    for (int l = 0; l <= m.n_max(); ++l) out << ',' << format_double(m(k, l));
    out << '\n';
  }
}

}  // namespace rydstat
