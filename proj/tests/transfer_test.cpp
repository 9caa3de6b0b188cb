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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "rydstat/fock.hpp"
#include "rydstat/transfer.hpp"

namespace rydstat {
namespace {

double binomial_pmf(int l, int k, double t) {
  if (k > l) return 0.0;
  if (t == 0.0) return k == 0 ? 1.0 : 0.0;
  if (t == 1.0) return k == l ? 1.0 : 0.0;
  return std::exp(std::lgamma(l + 1.0) - std::lgamma(k + 1.0) - std::lgamma(l - k + 1.0) +
                  k * std::log(t) + (l - k) * std::log1p(-t));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

double max_abs_diff(const TransferMatrix& a, const TransferMatrix& b) {
  double worst = 0.0;
  for (int k = 0; k <= a.n_max(); ++k) {
    for (int l = 0; l <= a.n_max(); ++l) worst = std::max(worst, std::abs(a(k, l) - b(k, l)));
  }
  return worst;
}

TEST(LossMatrix, Endpoints) {
  EXPECT_EQ(loss_matrix(1.0), TransferMatrix::identity(kDefaultNMax));
  const auto m = loss_matrix(0.0);
  for (int l = 0; l <= m.n_max(); ++l) {
    for (int k = 0; k <= m.n_max(); ++k) EXPECT_EQ(m(k, l), k == 0 ? 1.0 : 0.0);
  }
}

TEST(LossMatrix, HalfTransmissionColumnTwo) {
  const auto m = loss_matrix(0.5);
  EXPECT_DOUBLE_EQ(m(0, 2), 0.25);
  EXPECT_DOUBLE_EQ(m(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(m(2, 2), 0.25);
  EXPECT_EQ(m(3, 2), 0.0);
}

TEST(LossMatrix, MatchesBinomialPmf) {
  for (double t : {0.03, 0.21, 0.5, 0.77, 0.999}) {
    const auto m = loss_matrix(t, 40);
    for (int l = 0; l <= 40; ++l) {
      for (int k = 0; k <= 40; ++k) {
        EXPECT_NEAR(m(k, l), binomial_pmf(l, k, t), 1e-13) << t << " " << k << " " << l;
      }
    }
  }
}

TEST(LossMatrix, ColumnSumsAndShape) {
  for (double t : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    const auto m = loss_matrix(t, 60);
    EXPECT_TRUE(m.upper_triangular());
    for (int l = 0; l <= 60; ++l) EXPECT_NEAR(m.column_sum(l), 1.0, 1e-12);
  }
}

TEST(LossMatrix, RejectsOutOfRange) {
  EXPECT_EQ(code_of([] { loss_matrix(-0.01); }), ErrorCode::kTransmissionOutOfRange);
  EXPECT_EQ(code_of([] { loss_matrix(1.01); }), ErrorCode::kTransmissionOutOfRange);
}

TEST(LossMatrix, SemigroupOverRandomPairs) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double t1 = u(gen);
    const double t2 = u(gen);
    EXPECT_LT(max_abs_diff(compose(loss_matrix(t1), loss_matrix(t2)), loss_matrix(t1 * t2)),
              1e-12)
        << t1 << " " << t2;
  }
}

TEST(LossMatrix, PoissonClosure) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double t = u(gen);
    const double mu = 2.0 * u(gen);
    const auto out = apply(loss_matrix(t), coherent(mu));
    const auto expect = coherent(t * mu);
    for (std::size_t k = 0; k < out.size(); ++k) EXPECT_NEAR(out[k], expect[k], 1e-9);
  }
  const auto out = apply(loss_matrix(0.3), coherent(1.0));
  const auto expect = coherent(0.3);
  for (std::size_t k = 0; k < out.size(); ++k) EXPECT_NEAR(out[k], expect[k], 1e-9);
}

TEST(PerfectFilter, ActsOnSmallInputs) {
  const auto f = perfect_filter_matrix(2);
  const auto a = apply(f, fock_state(2, 2));
  EXPECT_EQ(a[0], 0.0);
  EXPECT_EQ(a[1], 1.0);
  EXPECT_EQ(a[2], 0.0);
  EXPECT_EQ(apply(f, vacuum(2)), vacuum(2));
  const auto b = apply(f, FockDistribution::from_probs({0.5, 0.3, 0.2}));
  EXPECT_DOUBLE_EQ(b[0], 0.5);
  EXPECT_DOUBLE_EQ(b[1], 0.5);
  EXPECT_EQ(b[2], 0.0);
}

TEST(PerfectFilter, Idempotent) {
  const auto f = perfect_filter_matrix();
  EXPECT_EQ(compose(f, f), f);
}

TEST(Apply, IdentityAndTotalLoss) {
  const auto d = coherent(0.8);
  EXPECT_EQ(apply(TransferMatrix::identity(kDefaultNMax), d), d);
  EXPECT_EQ(apply(loss_matrix(0.0), d), vacuum());
}

TEST(Apply, DimensionMismatch) {
  EXPECT_EQ(code_of([] { apply(loss_matrix(0.5, 10), coherent(0.1, 20)); }),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(code_of([] { compose(loss_matrix(0.5, 10), loss_matrix(0.5, 12)); }),
            ErrorCode::kDimensionMismatch);
}

TEST(Compose, IdentityIsNeutral) {
  const auto m = loss_matrix(0.37);
  EXPECT_EQ(compose(TransferMatrix::identity(kDefaultNMax), m), m);
}

TEST(Compose, PreservesColumnSums) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const auto m = compose(perfect_filter_matrix(), compose(loss_matrix(u(gen)), loss_matrix(u(gen))));
    EXPECT_TRUE(m.physical());
    for (int l = 0; l <= m.n_max(); ++l) EXPECT_NEAR(m.column_sum(l), 1.0, 1e-12);
  }
}

TEST(FromColumns, ValidatesStochasticity) {
  EXPECT_EQ(code_of([] { TransferMatrix::from_columns({{1.0, 0.0}, {0.6, 0.3}}); }),
            ErrorCode::kInvalidDistribution);
  EXPECT_EQ(code_of([] { TransferMatrix::from_columns({{1.0, 0.0}, {1.2, -0.2}}); }),
            ErrorCode::kInvalidDistribution);
}

TEST(Invert, Identity) {
  const auto inv = invert(TransferMatrix::identity(8));
  EXPECT_LT(max_abs_diff(inv, TransferMatrix::identity(8)), 1e-15);
}

TEST(Invert, UndoesHalfLossOnCoherentInput) {
  const auto back = apply(invert(loss_matrix(0.5)), coherent(0.25));
  const auto expect = coherent(0.5);
  for (std::size_t k = 0; k < back.size(); ++k) EXPECT_NEAR(back[k], expect[k], 1e-7);
}

TEST(Invert, RoundTripForWellConditionedLoss) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double t : {0.1, 0.2, 0.35, 0.5, 0.8, 1.0}) {
    const int n_max = 8;
    std::vector<double> w(n_max + 1);
    for (auto& x : w) x = u(gen);
    const auto d = FockDistribution::normalized(w);
    const auto back = apply(invert(loss_matrix(t, n_max)), apply(loss_matrix(t, n_max), d));
    for (std::size_t k = 0; k < d.size(); ++k) EXPECT_NEAR(back[k], d[k], 1e-7) << "t=" << t;
  }
}

TEST(Invert, Errors) {
  EXPECT_EQ(code_of([] { invert(perfect_filter_matrix()); }), ErrorCode::kSingularMatrix);
  EXPECT_EQ(code_of([] { invert(loss_matrix(0.1, 20)); }), ErrorCode::kIllConditioned);
}

TEST(Invert, ResultIsNotPhysical) {
  EXPECT_FALSE(invert(loss_matrix(0.5, 6)).physical());
}

TEST(TransferCsv, HeaderAndRows) {
  std::stringstream s;
  write_csv(s, loss_matrix(0.5, 2));
  EXPECT_EQ(s.str(), "k\\l,0,1,2\n0,1,0.5,0.25\n1,0,0.5,0.5\n2,0,0,0.25\n");
}

}  // namespace
}  // namespace rydstat
