// Copyright 2026 The qsd Authors
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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qsd/states.hpp"

namespace qsd {
namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Brute force: every nondecreasing tuple in [1, N]^P, filtered by the rule.
std::vector<std::vector<int>> brute_force_indices(int n, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(static_cast<std::size_t>(p), 1);
  for (;;) {
    bool ok = true;
    for (int i = 0; i + 1 < p; ++i) {
      if (t[i] > t[i + 1] || (t[i] == t[i + 1] && t[i] != n)) ok = false;
    }
    if (ok) out.push_back(t);
    int k = p - 1;
    while (k >= 0 && t[k] == n) t[k--] = 1;
    if (k < 0) break;
    ++t[k];
  }
  return out;
}

TEST(QubitState, Examples) {
  auto s0 = qubit_state(0, kPi / 4);
  EXPECT_NEAR(std::abs(s0[0] - Complex(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s0[1]), 0.0, 1e-15);
  auto s1 = qubit_state(1, kPi / 4);
  EXPECT_NEAR(s1[0].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(s1[1].real(), kInvSqrt2, 1e-15);
  auto s2 = qubit_state(2, kPi / 4);
  EXPECT_NEAR(std::abs(s2[0]), 0.0, 1e-15);
  EXPECT_NEAR(s2[1].real(), 1.0, 1e-15);
  EXPECT_EQ(s2.dim(), 2u);
}

TEST(PureState, RejectsUnnormalized) {
  VectorXc v(2);
  v << 1.0, 1.0;
  EXPECT_THROW(PureState{v}, InvariantViolation);
  EXPECT_THROW(PureState{VectorXc(0)}, InvalidArgument);
}

TEST(InnerProduct, Examples) {
  auto zero = qubit_state(0, kPi / 4), plus = qubit_state(1, kPi / 4), one = qubit_state(2, kPi / 4);
  EXPECT_NEAR(std::abs(inner_product(zero, zero) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(inner_product(zero, one)), 0.0, 1e-15);
  EXPECT_NEAR(inner_product(zero, plus).real(), kInvSqrt2, 1e-15);
}

TEST(InnerProduct, ConjugatesFirstArgument) {
  VectorXc a(2), b(2);
  a << Complex(0, 1), 0;
  b << 1, 0;
  EXPECT_NEAR(std::abs(inner_product(PureState(a), PureState(b)) - Complex(0, -1)), 0.0, 1e-15);
}

TEST(InnerProduct, DimensionMismatch) {
  VectorXc v = VectorXc::Zero(3);
  v(0) = 1;
  EXPECT_THROW(inner_product(qubit_state(0, 0.1), PureState(v)), DimensionError);
}

TEST(ChangeIndices, SmallExamples) {
  auto s = enumerate_change_indices(2, 2);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].entries, (std::vector<int>{1, 2}));
  EXPECT_EQ(s[1].entries, (std::vector<int>{2, 2}));
  auto t = enumerate_change_indices(3, 2);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[0].entries, (std::vector<int>{1, 2}));
  EXPECT_EQ(t[1].entries, (std::vector<int>{1, 3}));
  EXPECT_EQ(t[2].entries, (std::vector<int>{2, 3}));
  EXPECT_EQ(t[3].entries, (std::vector<int>{3, 3}));
}

TEST(ChangeIndices, ThreeChangesTwelveSteps) {
  // N + N(N-1)(N-2)/6 = 12 + 220
  EXPECT_EQ(enumerate_change_indices(12, 3).size(), 232u);
  EXPECT_EQ(change_index_count(12, 3), 232u);
}

TEST(ChangeIndices, CardinalityAndBruteForce) {
  for (int p = 1; p <= 3; ++p) {
    for (int n = 1; n <= 12; ++n) {
      const auto s = enumerate_change_indices(n, p);
      long expected = 0;
      for (int k = 0; k <= p; ++k) expected += binomial(n - 1, k);
      EXPECT_EQ(static_cast<long>(s.size()), expected) << "N=" << n << " P=" << p;
      const auto brute = brute_force_indices(n, p);  // already lexicographic
      ASSERT_EQ(brute.size(), s.size());
      for (std::size_t k = 0; k < s.size(); ++k) {
        EXPECT_EQ(s[k].entries, brute[k]);
        EXPECT_EQ(s.position_of(s[k]), k);
      }
    }
  }
}

TEST(ChangeIndices, OneChangeOrder) {
  const auto s = enumerate_change_indices(7, 1);
  ASSERT_EQ(s.size(), 7u);
  for (int k = 0; k < 7; ++k) EXPECT_EQ(s[k].entries, std::vector<int>{k + 1});
}

TEST(ChangeIndices, NoChangeSortsLast) {
  const auto s = enumerate_change_indices(5, 3);
  EXPECT_EQ(s[s.size() - 1].entries, (std::vector<int>{5, 5, 5}));
  EXPECT_THROW(s.position_of(ChangeIndex{{2, 2, 5}}), InvalidArgument);
  EXPECT_FALSE(s.contains(ChangeIndex{{2, 2, 5}}));
}

TEST(SequenceState, Examples) {
  const std::vector<PureState> a{qubit_state(0, kPi / 4), qubit_state(1, kPi / 4)};
  auto none = sequence_state(a, ChangeIndex{{2}}, 2);
  ASSERT_EQ(none.dim(), 4u);
  EXPECT_NEAR(std::abs(none[0] - 1.0), 0.0, 1e-15);
  auto one = sequence_state(a, ChangeIndex{{1}}, 2);
  // |0> (x) |+>
  EXPECT_NEAR(one[0].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(one[1].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(std::abs(one[2]) + std::abs(one[3]), 0.0, 1e-15);

  const std::vector<PureState> b{qubit_state(0, kPi / 4), qubit_state(1, kPi / 4), qubit_state(2, kPi / 4)};
  auto two = sequence_state(b, ChangeIndex{{1, 2}}, 3);
  // |0> (x) |+> (x) |1>: amplitudes on |001> and |011>
  ASSERT_EQ(two.dim(), 8u);
  EXPECT_NEAR(two[1].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(two[3].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(two.amplitudes().norm(), 1.0, 1e-14);
}

TEST(SequenceState, Errors) {
  const std::vector<PureState> a{qubit_state(0, 0.3), qubit_state(1, 0.3)};
  EXPECT_THROW(sequence_state(a, ChangeIndex{{1, 2}}, 3), InvalidArgument);
  EXPECT_THROW(sequence_state(a, ChangeIndex{{1}}, 30, 1u << 20), DimensionError);
}

TEST(SequenceState, UnitNormAndSlotProducts) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int p = 1; p <= 3; ++p) {
    std::vector<PureState> a;
    for (int k = 0; k <= p; ++k) {
      VectorXc v(2);
      v << Complex(g(rng), g(rng)), Complex(g(rng), g(rng));
      a.emplace_back(VectorXc(v / v.norm()));
    }
    for (int n = 1; n <= 6; ++n) {
      const auto idx = enumerate_change_indices(n, p);
      for (std::size_t x = 0; x < idx.size(); ++x) {
        const auto sx = sequence_state(a, idx[x], n);
        EXPECT_NEAR(sx.amplitudes().norm(), 1.0, 1e-12);
        for (std::size_t y = 0; y < idx.size(); ++y) {
          const auto sy = sequence_state(a, idx[y], n);
          Complex prod = 1.0;
          for (int t = 1; t <= n; ++t) {
            prod *= inner_product(a[static_cast<std::size_t>(symbol_at(idx[x], t))],
                                  a[static_cast<std::size_t>(symbol_at(idx[y], t))]);
          }
          EXPECT_NEAR(std::abs(inner_product(sx, sy) - prod), 0.0, 1e-12);
        }
      }
    }
  }
}

TEST(OverlapTable, Examples) {
  const std::vector<PureState> ortho{qubit_state(0, kPi / 4), qubit_state(2, kPi / 4)};
  const auto t0 = overlap_table(ortho);
  EXPECT_NEAR((t0.values - MatrixXc::Identity(2, 2)).norm(), 0.0, 1e-15);

  const std::vector<PureState> pair{qubit_state(0, kPi / 4), qubit_state(1, kPi / 4)};
  EXPECT_NEAR(overlap_table(pair).gamma(1), kInvSqrt2, 1e-15);

  std::vector<PureState> four;
  for (unsigned k = 0; k < 4; ++k) four.push_back(qubit_state(k, kPi / 4));
  const auto t = overlap_table(four);
  EXPECT_NEAR(t.gamma(1), kInvSqrt2, 1e-15);
  EXPECT_NEAR(t.gamma(1, 2), kInvSqrt2, 1e-15);
  EXPECT_NEAR(t.gamma(2, 3), kInvSqrt2, 1e-15);
  EXPECT_NEAR(t.gamma(2), 0.0, 1e-15);
  EXPECT_NEAR(t.values(0, 3).real(), -kInvSqrt2, 1e-15);
  EXPECT_NEAR(t.gamma(3), kInvSqrt2, 1e-15);
  EXPECT_NEAR(t.gamma(1, 3), 0.0, 1e-15);
  EXPECT_FALSE(t.is_nonnegative_real());
  // Hermitian, unit diagonal
  EXPECT_NEAR((t.values - t.values.adjoint()).norm(), 0.0, 1e-15);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(t.values(k, k) - 1.0), 0.0, 1e-15);
}

TEST(StateEnsemble, PriorsAndMatrix) {
  const std::vector<PureState> s{qubit_state(0, 0.2), qubit_state(1, 0.2), qubit_state(3, 0.2)};
  StateEnsemble e(s);
  EXPECT_NEAR(e.priors().sum(), 1.0, 1e-15);
  for (std::size_t j = 0; j < s.size(); ++j) {
    EXPECT_NEAR((e.state_matrix().col(static_cast<Eigen::Index>(j)) - s[j].amplitudes()).norm(), 0.0, 0.0);
  }
  VectorXd bad(3);
  bad << 0.5, 0.5, 0.5;
  EXPECT_THROW(StateEnsemble(s, bad), InvariantViolation);
  VectorXd neg(3);
  neg << 1.2, -0.1, -0.1;
  EXPECT_THROW(StateEnsemble(s, neg), InvariantViolation);
  EXPECT_THROW(StateEnsemble(s, VectorXd::Constant(2, 0.5)), DimensionError);
}

}  // namespace
}  // namespace qsd
