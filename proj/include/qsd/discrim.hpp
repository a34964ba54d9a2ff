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
#include <optional>
#include <string>
#include <vector>

#include "qsd/gram.hpp"
#include "qsd/linalg.hpp"
#include "qsd/rewards.hpp"
#include "qsd/sdp.hpp"
#include "qsd/states.hpp"
#include "qsd/structured_dual.hpp"

namespace qsd {

struct SolverDiagnostics {
  SolveStatus status = SolveStatus::numerical_failure;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double complementarity = 0.0;
  double min_eig_X = 0.0;
  double min_eig_Z = 0.0;
  double weak_duality_violation = 0.0;
  double wall_seconds = 0.0;
  std::size_t num_constraints = 0;
  std::vector<std::string> warnings;

  bool optimal() const { return status == SolveStatus::optimal; }
};

class DiscriminationInstance {
 public:
  DiscriminationInstance(GramMatrix gram, VectorXd priors, RewardMatrix reward,
                         std::optional<double> error_budget = std::nullopt);
  /// Uniform priors over the Gram's states.
  DiscriminationInstance(GramMatrix gram, RewardMatrix reward,
                         std::optional<double> error_budget = std::nullopt);

  const GramMatrix& gram() const { return gram_; }
  const VectorXd& priors() const { return priors_; }
  const RewardMatrix& reward() const { return reward_; }
  const std::optional<double>& error_budget() const { return error_budget_; }
  std::size_t num_states() const { return gram_.size(); }
  std::size_t num_outcomes() const { return reward_.num_guesses(); }

 private:
  GramMatrix gram_;
  VectorXd priors_;
  RewardMatrix reward_;
  std::optional<double> error_budget_;
};

struct ReducedPrimalSolution {
  std::vector<MatrixXc> W;
  double value = 0.0;
  /// Dual bound certified by the same solve.
  double dual_value = 0.0;
  std::size_t rank = 0;
  bool deflated = false;
  /// Outcomes whose feasible space is {0} after masking.
  std::vector<std::size_t> forced_zero_rows;
  SolverDiagnostics diagnostics;
};

struct DualSolution {
  MatrixXc X;
  double value = 0.0;
  /// Primal bound certified by the same solve.
  double primal_value = 0.0;
  bool structured = false;
  std::string structure;
  VectorXd parameters;
  std::size_t num_parameters = 0;
  /// Multiplier of the error budget (0 when absent).
  double budget_multiplier = 0.0;
  /// Rank of G; when deficient the constraints hold on range(G) only.
  std::size_t rank = 0;
  bool deflated = false;
  std::vector<std::string> notes;
  SolverDiagnostics diagnostics;
};

struct Povm {
  std::vector<MatrixXc> M;
};

struct OracleSolution {
  double value = 0.0;
  Povm povm;
  SolverDiagnostics diagnostics;
};

struct OutcomeStatistics {
  double p_correct = 0.0;
  double p_error = 0.0;
  double p_inconclusive = 0.0;
};

constexpr std::size_t kDefaultOracleDimCap = 256;

/// Full-dimension program over d x d POVM elements.
OracleSolution solve_full_oracle(const StateEnsemble& ensemble, const RewardMatrix& reward,
                                 const SolverOptions& opts = {},
                                 std::size_t dim_cap = kDefaultOracleDimCap);

/// Gram-reduced primal with deflation, masks and the optional error budget.
ReducedPrimalSolution solve_reduced_primal(const DiscriminationInstance& inst,
                                           const SolverOptions& opts = {});

/// Unrestricted reduced dual. Throws MaskedDualError for masked rewards.
DualSolution solve_reduced_dual(const DiscriminationInstance& inst, const SolverOptions& opts = {});

/// Reduced dual with X restricted to span(basis).
DualSolution solve_dual_with_basis(const DiscriminationInstance& inst, const DualBasis& basis,
                                   const SolverOptions& opts = {});

/// X restricted to (Hermitian) Toeplitz matrices.
DualSolution solve_heuristic_toeplitz(const DiscriminationInstance& inst, const SolverOptions& opts = {});

enum class ChangePointPattern { two, three };

/// X restricted to the block pattern of the given change-point family.
DualSolution solve_heuristic_structured(const DiscriminationInstance& inst, ChangePointPattern pattern,
                                        int horizon, const SolverOptions& opts = {});

/// M_i = (Psi^+)^* W_i Psi^+ + (1/L)(1 - Psi Psi^+).
Povm recover_povm(const ReducedPrimalSolution& sol, const StateEnsemble& ensemble);

/// max_{ij} |<psi_j|M_i|psi_j> - <j|W_i|j>|
double povm_statistics_defect(const Povm& povm, const std::vector<MatrixXc>& w,
                              const StateEnsemble& ensemble);
/// ||sum_i M_i - 1||_max
double povm_completeness_defect(const Povm& povm);
double povm_min_eigenvalue(const Povm& povm);

/// Identification-shaped statistics: rows 1..N guess the state, an optional
/// row N+1 is inconclusive.
OutcomeStatistics outcome_statistics(const std::vector<MatrixXc>& w, const VectorXd& priors);
OutcomeStatistics outcome_statistics(const Povm& povm, const StateEnsemble& ensemble);

/// sum_ij R_ij q_j <j|W_i|j>
double reward_value(const std::vector<MatrixXc>& w, const DiscriminationInstance& inst);

enum class Heuristic { none, toeplitz, pattern_2cp, pattern_3cp };

struct ReportOptions {
  bool oracle = false;
  bool primal = true;
  bool dual = true;
  Heuristic heuristic = Heuristic::none;
  int horizon = 0;
  SolverOptions solver;
};

struct SolveReport {
  std::optional<double> alpha;
  std::optional<double> alpha_prime;
  std::optional<double> beta_prime;
  std::optional<double> beta_double_prime;
  std::optional<SolverDiagnostics> oracle;
  std::optional<SolverDiagnostics> primal;
  std::optional<SolverDiagnostics> dual;
  std::optional<SolverDiagnostics> heuristic;
  std::size_t dual_parameters = 0;
  std::size_t heuristic_parameters = 0;
  std::vector<std::string> notes;

  /// Checks |alpha - alpha'|, |alpha' - beta'| <= 1e-6 and beta'' >= beta' - 1e-7
  /// over whichever values are present with optimal status.
  bool consistent() const;
};

SolveReport solve_report(const DiscriminationInstance& inst, const StateEnsemble* ensemble,
                         const ReportOptions& opts);

}  // namespace qsd
