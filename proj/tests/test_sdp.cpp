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
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qsd/sdp.hpp"

namespace qsd {
namespace {

using Eigen::SelfAdjointEigenSolver;

// All upper-triangle entries of a dense symmetric matrix as sparse entries.
void add_dense(LinearConstraint& c, int block, const MatrixXd& a) {
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = i; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) c.entries.push_back({block, i, j, a(i, j)});
    }
  }
}

double inner(const MatrixXd& a, const MatrixXd& x) { return (a.array() * x.array()).sum(); }

MatrixXd random_sym(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  }
  return (a + a.transpose()) / 2;
}

MatrixXd random_pd(std::mt19937_64& rng, int n) {
  MatrixXd a = random_sym(rng, n);
  return a * a.transpose() + 0.5 * MatrixXd::Identity(n, n);
}

// Strictly feasible on both sides: b = A(X0) for X0 > 0, C = A'(y0) + Z0 for Z0 > 0.
SdpProblem random_instance(std::mt19937_64& rng, const std::vector<int>& blocks, int m) {
  std::normal_distribution<double> nd;
  SdpProblem p;
  p.blocks = blocks;
  std::vector<MatrixXd> x0, c;
  for (int n : blocks) {
    x0.push_back(random_pd(rng, n));
    c.push_back(random_pd(rng, n));
  }
  for (int k = 0; k < m; ++k) {
    LinearConstraint con;
    const double y = nd(rng);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const MatrixXd a = random_sym(rng, blocks[b]);
      add_dense(con, static_cast<int>(b), a);
      con.rhs += inner(a, x0[b]);
      c[b] += y * a;
    }
    p.constraints.push_back(std::move(con));
  }
  // unit scale keeps the absolute gap comparable to the relative one
  double norm = 0.0;
  for (const auto& cb : c) norm += cb.squaredNorm();
  for (auto& cb : c) cb /= std::sqrt(norm);
  for (auto& con : p.constraints) {
    for (auto& e : con.entries) e.value /= std::sqrt(norm);
    con.rhs /= std::sqrt(norm);
  }
  p.objective = c;
  return p;
}

double block_min_eig(const MatrixXd& m) { return SelfAdjointEigenSolver<MatrixXd>(m).eigenvalues()(0); }

void expect_certificates(const SdpProblem& p, const SdpSolution& s) {
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_LE(s.primal_residual, 1e-8);
  EXPECT_LE(s.dual_residual, 1e-8);
  EXPECT_LE(s.gap, 1e-8);
  EXPECT_LE(s.complementarity, 1e-7 * (1 + std::abs(s.primal_value)));
  EXPECT_LE(s.weak_duality_violation, 1e-9);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    EXPECT_GE(block_min_eig(s.primal_X[b]), -1e-9);
    EXPECT_GE(block_min_eig(s.dual_slack_Z[b]), -1e-9);
  }
}

TEST(Solve, MinTraceWithCornerFixed) {
  SdpProblem p;
  p.blocks = {2};
  p.objective = {MatrixXd::Identity(2, 2)};
  p.constraints = {{{{0, 0, 0, 1.0}}, 1.0}};
  const auto s = solve(p);
  expect_certificates(p, s);
  EXPECT_NEAR(s.primal_value, 1.0, 1e-7);
  MatrixXd e = MatrixXd::Zero(2, 2);
  e(0, 0) = 1;
  EXPECT_LT((s.primal_X[0] - e).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Solve, MaxCornerUnderTrace) {
  SdpProblem p;
  p.blocks = {2};
  MatrixXd c = MatrixXd::Zero(2, 2);
  c(0, 0) = 1;
  p.objective = {c};
  p.constraints = {{{{0, 0, 0, 1.0}, {0, 1, 1, 1.0}}, 1.0}};
  p.sense = Sense::maximize;
  const auto s = solve(p);
  expect_certificates(p, s);
  EXPECT_NEAR(s.primal_value, 1.0, 1e-7);
}

TEST(Solve, TraceConstraintGivesExtremeEigenvalue) {
  // min <C, X> s.t. tr X = 1 is lambda_min(C); max is lambda_max(C)
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const MatrixXd c = random_sym(rng, 2);
    const auto ev = SelfAdjointEigenSolver<MatrixXd>(c).eigenvalues();
    SdpProblem p;
    p.blocks = {2};
    p.objective = {c};
    p.constraints = {{{{0, 0, 0, 1.0}, {0, 1, 1, 1.0}}, 1.0}};
    const auto lo = solve(p);
    expect_certificates(p, lo);
    EXPECT_NEAR(lo.primal_value, ev(0), 1e-7);
    p.sense = Sense::maximize;
    const auto hi = solve(p);
    expect_certificates(p, hi);
    EXPECT_NEAR(hi.primal_value, ev(1), 1e-7);
  }
}

TEST(Solve, TwoByTwoAgainstGrid) {
  // min <C, X> s.t. X11 = 1, X22 = 1: X = [[1, t], [t, 1]], |t| <= 1
  MatrixXd c(2, 2);
  c << 2.0, -0.7, -0.7, 1.0;
  SdpProblem p;
  p.blocks = {2};
  p.objective = {c};
  p.constraints = {{{{0, 0, 0, 1.0}}, 1.0}, {{{0, 1, 1, 1.0}}, 1.0}};
  double best = 1e300;
  for (int k = 0; k <= 20000; ++k) {
    const double t = -1.0 + 2.0 * k / 20000.0;
    best = std::min(best, 3.0 + 2 * t * -0.7);
  }
  const auto s = solve(p);
  expect_certificates(p, s);
  EXPECT_NEAR(s.primal_value, best, 1e-7);
}

TEST(Solve, RandomThreeBlockStrongDuality) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = random_instance(rng, {2, 3, 2}, 6);
    const auto s = solve(p);
    expect_certificates(p, s);
    EXPECT_NEAR(s.primal_value, s.dual_value, 1e-7);
    // independent evaluation of both objectives
    double px = 0.0;
    for (std::size_t b = 0; b < 3; ++b) px += inner(p.objective[b], s.primal_X[b]);
    EXPECT_NEAR(px, s.primal_value, 1e-9 * (1 + std::abs(px)));
    double by = 0.0;
    for (std::size_t k = 0; k < p.constraints.size(); ++k) by += p.constraints[k].rhs * s.dual_y(static_cast<Eigen::Index>(k));
    EXPECT_NEAR(by, s.dual_value, 1e-9 * (1 + std::abs(by)));
  }
}

TEST(Solve, ExplicitDualProgramMatchesPrimal) {
  // min <C,X>, <A_k,X> = b_k  versus  max b'y, C - sum y_k A_k = Z >= 0,
  // the latter written in standard form with y = u - v, u, v >= 0
  std::mt19937_64 rng(99);
  const int n = 3, m = 2;
  const auto p = random_instance(rng, {n}, m);
  std::vector<MatrixXd> a(m, MatrixXd::Zero(n, n));
  for (int k = 0; k < m; ++k) {
    for (const auto& e : p.constraints[k].entries) {
      a[k](e.row, e.col) += e.value;
      if (e.row != e.col) a[k](e.col, e.row) += e.value;
    }
  }
  SdpProblem d;
  d.sense = Sense::maximize;
  d.blocks = {n};
  d.objective = {MatrixXd::Zero(n, n)};
  for (int k = 0; k < m; ++k) {
    d.blocks.push_back(1);
    d.blocks.push_back(1);
    d.objective.push_back(MatrixXd::Constant(1, 1, p.constraints[k].rhs));
    d.objective.push_back(MatrixXd::Constant(1, 1, -p.constraints[k].rhs));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      LinearConstraint c;
      c.entries.push_back({0, i, j, i == j ? 1.0 : 0.5});
      for (int k = 0; k < m; ++k) {
        c.entries.push_back({1 + 2 * k, 0, 0, a[k](i, j)});
        c.entries.push_back({2 + 2 * k, 0, 0, -a[k](i, j)});
      }
      c.rhs = p.objective[0](i, j);
      d.constraints.push_back(std::move(c));
    }
  }
  const auto sp = solve(p);
  const auto sd = solve(d);
  ASSERT_EQ(sp.status, SolveStatus::optimal);
  ASSERT_EQ(sd.status, SolveStatus::optimal);
  EXPECT_NEAR(sp.primal_value, sd.primal_value, 1e-7);
}

TEST(Solve, InvariantUnderRowRescaling) {
  std::mt19937_64 rng(5);
  const auto p = random_instance(rng, {3, 2}, 4);
  auto q = p;
  const double scale[] = {10.0, 0.1, 3.0, 0.5};
  for (std::size_t k = 0; k < q.constraints.size(); ++k) {
    for (auto& e : q.constraints[k].entries) e.value *= scale[k];
    q.constraints[k].rhs *= scale[k];
  }
  const auto a = solve(p);
  const auto b = solve(q);
  ASSERT_EQ(a.status, SolveStatus::optimal);
  ASSERT_EQ(b.status, SolveStatus::optimal);
  EXPECT_NEAR(a.primal_value, b.primal_value, 1e-7 * (1 + std::abs(a.primal_value)));
  EXPECT_NEAR(a.dual_value, b.dual_value, 1e-7 * (1 + std::abs(a.dual_value)));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(a.dual_y(static_cast<Eigen::Index>(k)), b.dual_y(static_cast<Eigen::Index>(k)) * scale[k],
                1e-5 * (1 + std::abs(a.dual_y(static_cast<Eigen::Index>(k)))));
  }
}

TEST(Solve, InfeasibleIsReportedHonestly) {
  SdpProblem p;
  p.blocks = {2};
  p.objective = {MatrixXd::Identity(2, 2)};
  p.constraints = {{{{0, 0, 0, 1.0}}, -1.0}};
  const auto s = solve(p);
  EXPECT_NE(s.status, SolveStatus::optimal);
}

TEST(Solve, RejectsMalformedInput) {
  SdpProblem p;
  p.blocks = {2};
  p.objective = {MatrixXd::Identity(3, 3)};
  EXPECT_THROW(solve(p), DimensionError);
  p.objective = {MatrixXd::Identity(2, 2)};
  p.constraints = {{{{0, 0, 0, NAN}}, 1.0}};
  EXPECT_ANY_THROW(solve(p));
  p.constraints = {{{{1, 0, 0, 1.0}}, 1.0}};
  EXPECT_ANY_THROW(solve(p));
}

TEST(Embedding, RealInputIsBlockDiagonalCopy) {
  MatrixXc h(2, 2);
  h << 2.0, 0.3, 0.3, 1.0;
  const MatrixXd e = embed_hermitian_matrix(h);
  EXPECT_LT((e.topLeftCorner(2, 2) - h.real()).norm(), 1e-15);
  EXPECT_LT((e.bottomRightCorner(2, 2) - h.real()).norm(), 1e-15);
  EXPECT_LT(e.topRightCorner(2, 2).norm(), 1e-15);
  EXPECT_LT((recover_hermitian_matrix(e) - h).norm(), 1e-15);
}

TEST(Embedding, EigenvaluesDoubled) {
  MatrixXc h(2, 2);
  h << 1.0, Complex(0, 1), Complex(0, -1), 1.0;
  const auto ev = SelfAdjointEigenSolver<MatrixXd>(embed_hermitian_matrix(h)).eigenvalues();
  EXPECT_NEAR(ev(0), 0.0, 1e-12);
  EXPECT_NEAR(ev(1), 0.0, 1e-12);
  EXPECT_NEAR(ev(2), 2.0, 1e-12);
  EXPECT_NEAR(ev(3), 2.0, 1e-12);
  EXPECT_TRUE(check_psd(embed_hermitian_matrix(h), 1e-12).is_psd);
}

TEST(Embedding, ComplexSolveMatchesBlochParameterization) {
  // max <H, X> s.t. tr X = 1 over 2x2 density matrices X = (I + r.sigma)/2,
  // |r| <= 1, which gives (tr H + |h|)/2 with h the Pauli coordinates of H
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    const double a = nd(rng), d = nd(rng);
    const Complex off(nd(rng), nd(rng));
    MatrixXc h(2, 2);
    h << a, off, std::conj(off), d;
    ComplexSdpProblem p;
    p.blocks = {2};
    p.objective = {h};
    p.constraints = {{{{0, 0, 0, 1.0}, {0, 1, 1, 1.0}}, 1.0}};
    p.sense = Sense::maximize;
    const auto s = solve(p);
    ASSERT_EQ(s.real.status, SolveStatus::optimal);
    EXPECT_TRUE(s.embedded);
    const double hx = 2 * off.real(), hy = -2 * off.imag(), hz = a - d;
    const double expect = (a + d + std::sqrt(hx * hx + hy * hy + hz * hz)) / 2;
    EXPECT_NEAR(s.real.primal_value, expect, 1e-7);
    EXPECT_NEAR((h * s.primal_X[0]).trace().real(), expect, 1e-6);
    EXPECT_GE(check_psd(s.primal_X[0], 1e-9).min_eigenvalue, -1e-9);
  }
}

TEST(Embedding, RealDataSolvedDirectly) {
  ComplexSdpProblem p;
  p.blocks = {2};
  p.objective = {MatrixXc::Identity(2, 2)};
  p.constraints = {{{{0, 0, 0, 1.0}}, 1.0}};
  const auto s = solve(p);
  EXPECT_FALSE(s.embedded);
  EXPECT_NEAR(s.real.primal_value, 1.0, 1e-7);
}

TEST(Embedding, RejectsNonHermitian) {
  ComplexSdpProblem p;
  p.blocks = {2};
  MatrixXc h = MatrixXc::Identity(2, 2);
  h(0, 1) = Complex(0, 1);
  h(1, 0) = Complex(0, 1);
  p.objective = {h};
  EXPECT_ANY_THROW(embed_hermitian(p));
}

TEST(CheckPsd, Examples) {
  const auto id = check_psd(MatrixXd(MatrixXd::Identity(3, 3)), 1e-12);
  EXPECT_TRUE(id.is_psd);
  EXPECT_NEAR(id.min_eigenvalue, 1.0, 1e-15);
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = -0.5;
  const auto neg = check_psd(d, 1e-9);
  EXPECT_FALSE(neg.is_psd);
  EXPECT_NEAR(neg.min_eigenvalue, -0.5, 1e-15);
  MatrixXc g(2, 2);
  g << 1, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1;
  const auto gp = check_psd(g, 1e-12);
  EXPECT_TRUE(gp.is_psd);
  EXPECT_NEAR(gp.min_eigenvalue, 1 - 1 / std::sqrt(2.0), 1e-15);
}

TEST(Dump, ProblemRoundTrip) {
  std::mt19937_64 rng(3);
  const auto p = random_instance(rng, {2, 2}, 3);
  std::stringstream ss;
  write_problem(ss, p);
  const auto q = read_problem(ss);
  ASSERT_EQ(q.blocks, p.blocks);
  ASSERT_EQ(q.constraints.size(), p.constraints.size());
  const auto a = solve(p), b = solve(q);
  EXPECT_NEAR(a.primal_value, b.primal_value, 1e-9);
  std::stringstream out;
  write_solution(out, a);
  EXPECT_FALSE(out.str().empty());
}

}  // namespace
}  // namespace qsd
