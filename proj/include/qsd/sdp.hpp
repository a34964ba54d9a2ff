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

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "qsd/linalg.hpp"

namespace qsd {

enum class Sense { minimize, maximize };

/// One stored coefficient of a symmetric constraint matrix. Entries with
/// row != col stand for the symmetric pair (row, col) and (col, row);
/// duplicates add up.
struct SparseEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct LinearConstraint {
  std::vector<SparseEntry> entries;
  double rhs = 0.0;
};

/// Standard form
///   primal:  opt <C, X>  s.t.  <A_p, X> = b_p,  X psd (block diagonal)
///   dual:    min: max b'y  s.t.  C - sum y_p A_p psd
///            max: min b'y  s.t.  sum y_p A_p - C psd
struct SdpProblem {
  std::vector<int> blocks;
  std::vector<MatrixXd> objective;
  std::vector<LinearConstraint> constraints;
  Sense sense = Sense::minimize;

  std::size_t num_constraints() const { return constraints.size(); }
  /// Throws DimensionError / InvariantViolation on malformed data.
  void validate() const;
};

enum class SolveStatus { optimal, infeasible_or_unbounded, max_iterations, numerical_failure };

std::string to_string(SolveStatus s);

struct SolverOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
  double step_fraction = 0.98;
  double regularization = 1e-12;
  /// Iteration log (iteration, residuals, gap) when non-null.
  std::ostream* log = nullptr;
};

struct SdpSolution {
  std::vector<MatrixXd> primal_X;
  std::vector<MatrixXd> dual_slack_Z;
  VectorXd dual_y;
  double primal_value = 0.0;
  double dual_value = 0.0;
  /// |primal - dual| / (1 + |primal|)
  double gap = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  int iterations = 0;

  /// ||b - A(X)|| / (1 + ||b||)
  double primal_residual = 0.0;
  /// ||C - Z - A'y||_F / (1 + ||C||_F), in the sign convention of the sense.
  double dual_residual = 0.0;
  /// <X, Z>
  double complementarity = 0.0;
  /// Largest weak-duality excess over iterates that were feasible to tolerance.
  double weak_duality_violation = 0.0;
  double min_eig_X = 0.0;
  double min_eig_Z = 0.0;
  std::vector<std::string> warnings;
};

SdpSolution solve(const SdpProblem& p, const SolverOptions& opts = {});

// ---------------------------------------------------------------------------
// Complex Hermitian data.

struct ComplexEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  Complex value;
};

struct ComplexConstraint {
  std::vector<ComplexEntry> entries;
  double rhs = 0.0;
};

/// Same form as SdpProblem with Hermitian blocks and <A, X> = Re tr(A X).
/// An off-diagonal entry (r, c, v) stands for v at (r, c) and conj(v) at (c, r).
struct ComplexSdpProblem {
  std::vector<int> blocks;
  std::vector<MatrixXc> objective;
  std::vector<ComplexConstraint> constraints;
  Sense sense = Sense::minimize;

  void validate() const;
  bool is_real(double tol = 1e-14) const;
};

struct ComplexSdpSolution {
  std::vector<MatrixXc> primal_X;
  std::vector<MatrixXc> dual_slack_Z;
  SdpSolution real;  ///< the solve that produced it (embedded or direct)
  bool embedded = false;
};

/// [[Re H, -Im H], [Im H, Re H]]
MatrixXd embed_hermitian_matrix(const MatrixXc& h);
/// Inverse of the embedding, averaging the two copies.
MatrixXc recover_hermitian_matrix(const MatrixXd& y);

/// Real symmetric problem with 2n x 2n blocks whose optimum equals the
/// Hermitian optimum (all data carry a factor 1/2).
SdpProblem embed_hermitian(const ComplexSdpProblem& p);

/// Solves directly when all data are real, through the embedding otherwise.
ComplexSdpSolution solve(const ComplexSdpProblem& p, const SolverOptions& opts = {});

// ---------------------------------------------------------------------------
// Dense structured-text dump.

void write_problem(std::ostream& out, const SdpProblem& p);
SdpProblem read_problem(std::istream& in);
void write_solution(std::ostream& out, const SdpSolution& s);

}  // namespace qsd
