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

#include "qsd/discrim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qsd {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kPriorTolerance = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SolverDiagnostics diagnostics_of(const SdpSolution& s, double wall, std::size_t m) {
  SolverDiagnostics d;
  d.status = s.status;
  d.iterations = s.iterations;
  d.primal_residual = s.primal_residual;
  d.dual_residual = s.dual_residual;
  d.gap = s.gap;
  d.complementarity = s.complementarity;
  d.min_eig_X = s.min_eig_X;
  d.min_eig_Z = s.min_eig_Z;
  d.weak_duality_violation = s.weak_duality_violation;
  d.wall_seconds = wall;
  d.num_constraints = m;
  d.warnings = s.warnings;
  return d;
}

// Orthonormal basis (columns) of {x : a x = 0}.
MatrixXc null_space(const MatrixXc& a, Eigen::Index cols) {
  if (a.rows() == 0) return MatrixXc::Identity(cols, cols);
  Eigen::JacobiSVD<MatrixXc> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = kRankTolerance * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

MatrixXc null_space_real(const MatrixXd& a, Eigen::Index cols) {
  if (a.rows() == 0) return MatrixXc::Identity(cols, cols);
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = kRankTolerance * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixV().rightCols(cols - rank).cast<Complex>();
}

// Range of G: target = diag of kept eigenvalues with isometry u when G is
// rank deficient, otherwise G itself.
struct RangeFrame {
  std::size_t rank = 0;
  bool deflated = false;
  MatrixXc u;
  MatrixXc target;
};

RangeFrame range_frame(const MatrixXc& g, bool real) {
  const auto n = static_cast<std::size_t>(g.rows());
  VectorXd lambda;
  MatrixXc vecs;
  if (real) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(g.real());
    lambda = es.eigenvalues();
    vecs = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(g);
    lambda = es.eigenvalues();
    vecs = es.eigenvectors();
  }
  const double cut = kRankTolerance * std::max(1.0, lambda.maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = lambda.size() - 1; k >= 0; --k) {
    if (lambda(k) > cut) keep.push_back(k);
  }
  RangeFrame f;
  f.rank = keep.size();
  f.deflated = keep.size() < n;
  if (!f.deflated) {
    f.target = g;
    return f;
  }
  f.u.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(keep.size()));
  f.target = MatrixXc::Zero(f.u.cols(), f.u.cols());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    f.u.col(static_cast<Eigen::Index>(c)) = vecs.col(keep[c]);
    f.target(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) = lambda(keep[c]);
  }
  return f;
}

// Block i of sum_i B_i Wt_i B_i^* = T, with B_i either the identity or a
// dense r x s_i isometry.
struct Coordinates {
  bool identity = true;
  MatrixXc b;
};

void push_dense(std::vector<ComplexEntry>& out, int block, const MatrixXc& h) {
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    for (Eigen::Index c = r; c < h.cols(); ++c) {
      Complex v = h(r, c);
      if (std::abs(v) <= 1e-15) continue;
      if (r == c) v = Complex(v.real(), 0.0);
      out.push_back({block, static_cast<int>(r), static_cast<int>(c), v});
    }
  }
}

// Constraints <A, sum_i B_i Wt_i B_i^*> = <A, T> for A running over a
// Hermitian (complex) or symmetric (real) unit basis of r x r matrices.
std::vector<ComplexConstraint> sum_constraints(const std::vector<Coordinates>& coords, const MatrixXc& t,
                                               bool complex) {
  const int r = static_cast<int>(t.rows());
  std::vector<ComplexConstraint> out;
  out.reserve(complex ? static_cast<std::size_t>(r) * r : static_cast<std::size_t>(r) * (r + 1) / 2);
  auto add = [&](int a, int b, Complex unit) {
    ComplexConstraint c;
    if (a == b) {
      c.rhs = t(a, a).real();
    } else {
      c.rhs = 2.0 * (unit * t(b, a)).real();
    }
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const int blk = static_cast<int>(i);
      if (coords[i].identity) {
        c.entries.push_back({blk, a, b, unit});
        continue;
      }
      const MatrixXc& bm = coords[i].b;
      const MatrixXc ra = bm.row(a).adjoint();
      const MatrixXc rb = bm.row(b).adjoint();
      MatrixXc h = unit * ra * rb.adjoint();
      if (a != b) h += (unit * ra * rb.adjoint()).adjoint().eval();
      push_dense(c.entries, blk, h);
    }
    out.push_back(std::move(c));
  };
  for (int a = 0; a < r; ++a) {
    for (int b = a; b < r; ++b) add(a, b, Complex(1.0, 0.0));
  }
  if (complex) {
    for (int a = 0; a < r; ++a) {
      for (int b = a + 1; b < r; ++b) add(a, b, Complex(0.0, 1.0));
    }
  }
  return out;
}

MatrixXc compress(const Coordinates& c, const MatrixXc& m) {
  return c.identity ? m : MatrixXc(c.b.adjoint() * m * c.b);
}

MatrixXc lift(const Coordinates& c, const MatrixXc& m) {
  return c.identity ? m : MatrixXc(c.b * m * c.b.adjoint());
}

MatrixXc reward_diagonal(const DiscriminationInstance& inst, std::size_t i) {
  const auto n = static_cast<Eigen::Index>(inst.num_states());
  MatrixXc d = MatrixXc::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d(j, j) = inst.reward()(i, static_cast<std::size_t>(j)) * inst.priors()(j);
  }
  return d;
}

// diag(q_j [j != i]) for guess rows; zero for the inconclusive row.
MatrixXc error_weights(const DiscriminationInstance& inst, std::size_t i) {
  const auto n = static_cast<Eigen::Index>(inst.num_states());
  MatrixXc e = MatrixXc::Zero(n, n);
  if (i >= inst.num_states()) return e;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (static_cast<std::size_t>(j) != i) e(j, j) = inst.priors()(j);
  }
  return e;
}

void require_identification_shape(const DiscriminationInstance& inst) {
  const std::size_t n = inst.num_states(), l = inst.num_outcomes();
  if (l != n && l != n + 1) {
    throw InvalidArgument("error budget needs N guess rows plus an optional inconclusive row");
  }
}

// Appends sum_i <E_i, Wt_i> + s = eps with a fresh 1 x 1 slack block.
void add_budget(ComplexSdpProblem& p, const std::vector<MatrixXc>& weights, double eps) {
  ComplexConstraint c;
  c.rhs = eps;
  for (std::size_t i = 0; i < weights.size(); ++i) push_dense(c.entries, static_cast<int>(i), weights[i]);
  const int slack = static_cast<int>(p.blocks.size());
  p.blocks.push_back(1);
  p.objective.push_back(MatrixXc::Zero(1, 1));
  c.entries.push_back({slack, 0, 0, Complex(1.0, 0.0)});
  p.constraints.push_back(std::move(c));
}

}  // namespace

DiscriminationInstance::DiscriminationInstance(GramMatrix gram, VectorXd priors, RewardMatrix reward,
                                               std::optional<double> error_budget)
    : gram_(std::move(gram)),
      priors_(std::move(priors)),
      reward_(std::move(reward)),
      error_budget_(error_budget) {
  if (reward_.num_states() != gram_.size()) {
    throw DimensionError("DiscriminationInstance: reward columns differ from Gram size");
  }
  if (static_cast<std::size_t>(priors_.size()) != gram_.size()) {
    throw DimensionError("DiscriminationInstance: prior length differs from Gram size");
  }
  if (!priors_.allFinite() || (priors_.array() < 0.0).any() ||
      std::abs(priors_.sum() - 1.0) > kPriorTolerance) {
    throw InvariantViolation("DiscriminationInstance: priors must be nonnegative and sum to 1");
  }
  if (error_budget_ && !(*error_budget_ >= 0.0 && *error_budget_ <= 1.0)) {
    throw InvalidArgument("DiscriminationInstance: error budget must lie in [0, 1]");
  }
  if (error_budget_) require_identification_shape(*this);
}

DiscriminationInstance::DiscriminationInstance(GramMatrix gram, RewardMatrix reward,
                                               std::optional<double> error_budget)
    : DiscriminationInstance(gram, VectorXd::Constant(static_cast<Eigen::Index>(gram.size()),
                                                      1.0 / static_cast<double>(gram.size())),
                             std::move(reward), error_budget) {}

ReducedPrimalSolution solve_reduced_primal(const DiscriminationInstance& inst, const SolverOptions& opts) {
  const auto t0 = Clock::now();
  const std::size_t n = inst.num_states(), l = inst.num_outcomes();
  const MatrixXc& g = inst.gram().entries();
  const bool real = inst.gram().is_real();

  auto mask = inst.reward().forbidden();
  std::optional<double> eps = inst.error_budget();
  if (eps && *eps == 0.0) {
    // A zero budget is the exact mask on every wrong guess with positive prior.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && inst.priors()(static_cast<Eigen::Index>(j)) > 0.0) {
          mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = true;
        }
      }
    }
    eps.reset();
  }

  ReducedPrimalSolution out;
  const RangeFrame frame = range_frame(g, real);
  out.rank = frame.rank;
  out.deflated = frame.deflated;
  const MatrixXc& u = frame.u;
  const MatrixXc& target = frame.target;
  const auto r = target.rows();

  // Coordinates per outcome, in the frame of `target`.
  std::vector<Coordinates> coords;
  std::vector<std::size_t> rows;
  std::vector<MatrixXc> isometry;  // N x s_i, maps block coordinates to state space
  for (std::size_t i = 0; i < l; ++i) {
    std::vector<Eigen::Index> forbidden, allowed;
    for (std::size_t j = 0; j < n; ++j) {
      (mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ? forbidden : allowed)
          .push_back(static_cast<Eigen::Index>(j));
    }
    Coordinates c;
    MatrixXc v;
    if (!out.deflated) {
      if (!forbidden.empty()) {
        c.identity = false;
        c.b = MatrixXc::Zero(r, static_cast<Eigen::Index>(allowed.size()));
        for (std::size_t s = 0; s < allowed.size(); ++s) c.b(allowed[s], static_cast<Eigen::Index>(s)) = 1.0;
        v = c.b;
      } else {
        v = MatrixXc::Identity(r, r);
      }
    } else {
      if (!forbidden.empty()) {
        MatrixXc uf(static_cast<Eigen::Index>(forbidden.size()), r);
        for (std::size_t s = 0; s < forbidden.size(); ++s) uf.row(static_cast<Eigen::Index>(s)) = u.row(forbidden[s]);
        c.identity = false;
        c.b = real ? null_space_real(uf.real(), r) : null_space(uf, r);
      } else {
        c.identity = true;
      }
      v = c.identity ? u : MatrixXc(u * c.b);
    }
    if (v.cols() == 0) {
      out.forced_zero_rows.push_back(i);
      continue;
    }
    coords.push_back(std::move(c));
    rows.push_back(i);
    isometry.push_back(std::move(v));
  }

  const bool complex = !real;
  ComplexSdpProblem p;
  p.sense = Sense::maximize;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    p.blocks.push_back(static_cast<int>(isometry[k].cols()));
    MatrixXc obj = isometry[k].adjoint() * reward_diagonal(inst, rows[k]) * isometry[k];
    p.objective.push_back(0.5 * (obj + obj.adjoint()));
  }
  if (coords.empty()) {
    out.diagnostics.status = SolveStatus::infeasible_or_unbounded;
    out.diagnostics.warnings.push_back("every outcome is forced to zero by the mask");
    out.W.assign(l, MatrixXc::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    out.diagnostics.wall_seconds = seconds_since(t0);
    return out;
  }
  p.constraints = sum_constraints(coords, target, complex);
  if (eps) {
    std::vector<MatrixXc> weights;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      weights.push_back(isometry[k].adjoint() * error_weights(inst, rows[k]) * isometry[k]);
    }
    add_budget(p, weights, *eps);
  }

  const ComplexSdpSolution sol = solve(p, opts);
  out.value = sol.real.primal_value;
  out.dual_value = sol.real.dual_value;
  out.W.assign(l, MatrixXc::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    MatrixXc w = isometry[k] * sol.primal_X[k] * isometry[k].adjoint();
    out.W[rows[k]] = 0.5 * (w + w.adjoint());
  }
  out.diagnostics = diagnostics_of(sol.real, seconds_since(t0), p.constraints.size());
  return out;
}

DualSolution solve_dual_with_basis(const DiscriminationInstance& inst, const DualBasis& basis,
                                   const SolverOptions& opts) {
  const auto t0 = Clock::now();
  if (inst.reward().has_mask()) {
    throw MaskedDualError("dual programs need finite rewards; solve masked schemes on the primal side");
  }
  const std::size_t n = inst.num_states(), l = inst.num_outcomes();
  if (basis.dim != n) throw DimensionError("dual basis dimension differs from the Gram size");
  const MatrixXc& g = inst.gram().entries();
  const VectorXd pvec = basis_inner_products(basis, g);

  const RangeFrame frame = range_frame(g, inst.gram().is_real());
  const auto count = static_cast<Eigen::Index>(basis.elements.size());

  ComplexSdpProblem p;
  p.sense = Sense::maximize;
  // Parameter map: SDP multiplier z -> basis coefficients x = coeff * z.
  MatrixXd coeff;
  if (!frame.deflated) {
    for (std::size_t i = 0; i < l; ++i) {
      p.blocks.push_back(static_cast<int>(n));
      p.objective.push_back(reward_diagonal(inst, i));
    }
    for (std::size_t t = 0; t < basis.elements.size(); ++t) {
      ComplexConstraint c;
      c.rhs = pvec(static_cast<Eigen::Index>(t));
      c.entries.reserve(basis.elements[t].size() * l);
      for (std::size_t i = 0; i < l; ++i) {
        for (const auto& e : basis.elements[t]) c.entries.push_back({static_cast<int>(i), e.row, e.col, e.value});
      }
      p.constraints.push_back(std::move(c));
    }
    coeff = MatrixXd::Identity(count, count);
  } else {
    // Rank-deficient G: the constraints X >= D_i only bind on range(G), and
    // on the full space the infimum need not be attained. Compress every
    // basis element to that range and keep an independent combination.
    const MatrixXc& u = frame.u;
    const auto r = u.cols();
    std::vector<MatrixXc> compressed;
    compressed.reserve(basis.elements.size());
    MatrixXd coords(2 * r * r, count);
    for (Eigen::Index t = 0; t < count; ++t) {
      const MatrixXc c = u.adjoint() * basis.assemble(VectorXd::Unit(count, t)) * u;
      for (Eigen::Index a = 0; a < r; ++a) {
        for (Eigen::Index b = 0; b < r; ++b) {
          coords(a * r + b, t) = c(a, b).real();
          coords(r * r + a * r + b, t) = c(a, b).imag();
        }
      }
      compressed.push_back(c);
    }
    Eigen::BDCSVD<MatrixXd> svd(coords, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cut = kRankTolerance * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Eigen::Index k = 0;
    while (k < sv.size() && sv(k) > cut) ++k;
    coeff = svd.matrixV().leftCols(k);
    for (std::size_t i = 0; i < l; ++i) {
      p.blocks.push_back(static_cast<int>(r));
      MatrixXc obj = u.adjoint() * reward_diagonal(inst, i) * u;
      p.objective.push_back(0.5 * (obj + obj.adjoint()));
    }
    for (Eigen::Index s = 0; s < k; ++s) {
      MatrixXc e = MatrixXc::Zero(r, r);
      for (Eigen::Index t = 0; t < count; ++t) e += coeff(t, s) * compressed[static_cast<std::size_t>(t)];
      e = 0.5 * (e + e.adjoint()).eval();
      ComplexConstraint c;
      c.rhs = (e * frame.target).trace().real();
      for (std::size_t i = 0; i < l; ++i) push_dense(c.entries, static_cast<int>(i), e);
      p.constraints.push_back(std::move(c));
    }
  }
  const auto used = static_cast<Eigen::Index>(p.constraints.size());
  if (inst.error_budget()) {
    std::vector<MatrixXc> weights;
    for (std::size_t i = 0; i < l; ++i) {
      weights.push_back(frame.deflated ? MatrixXc(frame.u.adjoint() * error_weights(inst, i) * frame.u)
                                       : error_weights(inst, i));
    }
    add_budget(p, weights, *inst.error_budget());
  }

  const ComplexSdpSolution sol = solve(p, opts);
  DualSolution out;
  out.parameters = coeff * sol.real.dual_y.head(used);
  out.num_parameters = basis.elements.size();
  out.X = basis.assemble(out.parameters);
  out.value = sol.real.dual_value;
  out.primal_value = sol.real.primal_value;
  out.rank = frame.rank;
  out.deflated = frame.deflated;
  if (frame.deflated) {
    out.notes.push_back("Gram matrix has rank " + std::to_string(frame.rank) + " of " + std::to_string(n) +
                        "; dual constraints imposed on its range");
  }
  if (inst.error_budget()) out.budget_multiplier = sol.real.dual_y(used);
  out.structure = basis.name;
  out.diagnostics = diagnostics_of(sol.real, seconds_since(t0), p.constraints.size());
  return out;
}

DualSolution solve_reduced_dual(const DiscriminationInstance& inst, const SolverOptions& opts) {
  const bool complex = !inst.gram().is_real();
  return solve_dual_with_basis(inst, full_hermitian_basis(inst.num_states(), complex), opts);
}

DualSolution solve_heuristic_toeplitz(const DiscriminationInstance& inst, const SolverOptions& opts) {
  const bool complex = !inst.gram().is_real();
  const DualBasis basis = toeplitz_basis(inst.num_states(), complex);
  DualSolution out = solve_dual_with_basis(inst, basis, opts);
  out.structured = true;
  if (toeplitz_defect(inst.gram().entries()) > 1e-12) {
    out.notes.push_back("Toeplitz restriction applied to a Gram matrix that is not Toeplitz");
  }
  if (out.diagnostics.optimal()) {
    const double xg = (out.X * inst.gram().entries()).trace().real();
    const double xp = out.parameters.dot(basis_inner_products(basis, inst.gram().entries()));
    if (std::abs(xg - xp) > 1e-9 * (1.0 + std::abs(xg))) {
      throw InvariantViolation("Toeplitz heuristic: <X, G> differs from <x, p>");
    }
  }
  return out;
}

DualSolution solve_heuristic_structured(const DiscriminationInstance& inst, ChangePointPattern pattern,
                                        int horizon, const SolverOptions& opts) {
  const DualBasis basis =
      pattern == ChangePointPattern::two ? pattern_basis_2cp(horizon) : pattern_basis_3cp(horizon);
  if (basis.dim != inst.num_states()) {
    throw DimensionError("structured heuristic: pattern size differs from the instance");
  }
  if (!inst.gram().is_real()) {
    throw InvalidArgument("structured heuristic: the block patterns are defined for real Gram matrices");
  }
  DualSolution out = solve_dual_with_basis(inst, basis, opts);
  out.structured = true;
  return out;
}

OracleSolution solve_full_oracle(const StateEnsemble& ensemble, const RewardMatrix& reward,
                                 const SolverOptions& opts, std::size_t dim_cap) {
  const auto t0 = Clock::now();
  const std::size_t d = ensemble.dim(), n = ensemble.size(), l = reward.num_guesses();
  if (d > dim_cap) {
    throw DimensionError("solve_full_oracle: dimension " + std::to_string(d) + " exceeds the cap " +
                         std::to_string(dim_cap));
  }
  if (reward.num_states() != n) throw DimensionError("solve_full_oracle: reward columns differ from ensemble");
  const MatrixXc& psi = ensemble.state_matrix();
  const bool real = is_effectively_real(psi);
  const auto dd = static_cast<Eigen::Index>(d);

  std::vector<Coordinates> coords;
  std::vector<std::size_t> rows;
  ComplexSdpProblem p;
  p.sense = Sense::maximize;
  for (std::size_t i = 0; i < l; ++i) {
    std::vector<Eigen::Index> forbidden;
    for (std::size_t j = 0; j < n; ++j) {
      if (reward.is_forbidden(i, j)) forbidden.push_back(static_cast<Eigen::Index>(j));
    }
    Coordinates c;
    if (!forbidden.empty()) {
      MatrixXc a(static_cast<Eigen::Index>(forbidden.size()), dd);
      for (std::size_t s = 0; s < forbidden.size(); ++s) {
        a.row(static_cast<Eigen::Index>(s)) = psi.col(forbidden[s]).adjoint();
      }
      c.identity = false;
      c.b = real ? null_space_real(a.real(), dd) : null_space(a, dd);
      if (c.b.cols() == 0) continue;
    }
    MatrixXc obj = MatrixXc::Zero(dd, dd);
    for (std::size_t j = 0; j < n; ++j) {
      const double w = reward(i, j) * ensemble.priors()(static_cast<Eigen::Index>(j));
      if (w != 0.0) obj += w * psi.col(static_cast<Eigen::Index>(j)) * psi.col(static_cast<Eigen::Index>(j)).adjoint();
    }
    obj = compress(c, obj);
    p.blocks.push_back(static_cast<int>(obj.rows()));
    p.objective.push_back(0.5 * (obj + obj.adjoint()));
    coords.push_back(std::move(c));
    rows.push_back(i);
  }
  OracleSolution out;
  out.povm.M.assign(l, MatrixXc::Zero(dd, dd));
  if (coords.empty()) {
    out.diagnostics.status = SolveStatus::infeasible_or_unbounded;
    out.diagnostics.wall_seconds = seconds_since(t0);
    return out;
  }
  p.constraints = sum_constraints(coords, MatrixXc::Identity(dd, dd), !real);
  const ComplexSdpSolution sol = solve(p, opts);
  out.value = sol.real.primal_value;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    MatrixXc m = lift(coords[k], sol.primal_X[k]);
    out.povm.M[rows[k]] = 0.5 * (m + m.adjoint());
  }
  out.diagnostics = diagnostics_of(sol.real, seconds_since(t0), p.constraints.size());
  return out;
}

Povm recover_povm(const ReducedPrimalSolution& sol, const StateEnsemble& ensemble) {
  const auto n = static_cast<Eigen::Index>(ensemble.size());
  if (sol.W.empty()) throw DimensionError("recover_povm: empty solution");
  MatrixXc sum = MatrixXc::Zero(n, n);
  for (const auto& w : sol.W) {
    if (w.rows() != n || w.cols() != n) throw DimensionError("recover_povm: W size differs from ensemble");
    sum += w;
  }
  const MatrixXc& psi = ensemble.state_matrix();
  const MatrixXc gram = psi.adjoint() * psi;
  if ((gram - sum).cwiseAbs().maxCoeff() > 1e-6) {
    throw InvariantViolation("recover_povm: ensemble Gram differs from sum_i W_i");
  }
  Eigen::JacobiSVD<MatrixXc> svd(psi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cut = kRankTolerance * std::max(1.0, s.size() ? s(0) : 0.0);
  VectorXd inv = VectorXd::Zero(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cut) inv(k) = 1.0 / s(k);
  }
  const MatrixXc pinv = svd.matrixV() * inv.cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
  const auto d = psi.rows();
  const MatrixXc complement = MatrixXc::Identity(d, d) - psi * pinv;
  const double share = 1.0 / static_cast<double>(sol.W.size());
  Povm out;
  for (const auto& w : sol.W) {
    MatrixXc m = pinv.adjoint() * w * pinv + share * complement;
    out.M.push_back(0.5 * (m + m.adjoint()));
  }
  return out;
}

double povm_statistics_defect(const Povm& povm, const std::vector<MatrixXc>& w, const StateEnsemble& ensemble) {
  if (povm.M.size() != w.size()) throw DimensionError("povm_statistics_defect: outcome count mismatch");
  const MatrixXc& psi = ensemble.state_matrix();
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const MatrixXc stats = psi.adjoint() * povm.M[i] * psi;
    for (Eigen::Index j = 0; j < psi.cols(); ++j) worst = std::max(worst, std::abs(stats(j, j) - w[i](j, j)));
  }
  return worst;
}

double povm_completeness_defect(const Povm& povm) {
  if (povm.M.empty()) return std::numeric_limits<double>::infinity();
  MatrixXc sum = MatrixXc::Zero(povm.M[0].rows(), povm.M[0].cols());
  for (const auto& m : povm.M) sum += m;
  return (sum - MatrixXc::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
}

double povm_min_eigenvalue(const Povm& povm) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& m : povm.M) lo = std::min(lo, check_psd(m, 0.0).min_eigenvalue);
  return lo;
}

namespace {

OutcomeStatistics statistics_from_table(const MatrixXd& p, const VectorXd& priors) {
  const Eigen::Index n = priors.size(), l = p.rows();
  if (l != n && l != n + 1) {
    throw DimensionError("outcome_statistics: expected N or N + 1 outcomes");
  }
  OutcomeStatistics s;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) (i == j ? s.p_correct : s.p_error) += priors(j) * p(i, j);
  }
  if (l == n + 1) {
    for (Eigen::Index j = 0; j < n; ++j) s.p_inconclusive += priors(j) * p(n, j);
  }
  return s;
}

}  // namespace

OutcomeStatistics outcome_statistics(const std::vector<MatrixXc>& w, const VectorXd& priors) {
  MatrixXd p(static_cast<Eigen::Index>(w.size()), priors.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].rows() != priors.size()) throw DimensionError("outcome_statistics: W size differs from priors");
    p.row(static_cast<Eigen::Index>(i)) = w[i].diagonal().real().transpose();
  }
  return statistics_from_table(p, priors);
}

OutcomeStatistics outcome_statistics(const Povm& povm, const StateEnsemble& ensemble) {
  const MatrixXc& psi = ensemble.state_matrix();
  MatrixXd p(static_cast<Eigen::Index>(povm.M.size()), psi.cols());
  for (std::size_t i = 0; i < povm.M.size(); ++i) {
    p.row(static_cast<Eigen::Index>(i)) = (psi.adjoint() * povm.M[i] * psi).diagonal().real().transpose();
  }
  return statistics_from_table(p, ensemble.priors());
}

double reward_value(const std::vector<MatrixXc>& w, const DiscriminationInstance& inst) {
  if (w.size() != inst.num_outcomes()) throw DimensionError("reward_value: outcome count mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < inst.num_states(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      v += inst.reward()(i, j) * inst.priors()(jj) * w[i](jj, jj).real();
    }
  }
  return v;
}

bool SolveReport::consistent() const {
  auto ok = [](const std::optional<SolverDiagnostics>& d) { return d && d->optimal(); };
  if (alpha && alpha_prime && ok(oracle) && ok(primal) && std::abs(*alpha - *alpha_prime) > 1e-6) return false;
  if (alpha_prime && beta_prime && ok(primal) && ok(dual) && std::abs(*alpha_prime - *beta_prime) > 1e-6) {
    return false;
  }
  if (beta_prime && beta_double_prime && ok(dual) && ok(heuristic) && *beta_double_prime < *beta_prime - 1e-7) {
    return false;
  }
  return true;
}

SolveReport solve_report(const DiscriminationInstance& inst, const StateEnsemble* ensemble,
                         const ReportOptions& opts) {
  SolveReport rep;
  if (opts.oracle) {
    if (!ensemble) throw InvalidArgument("solve_report: the oracle needs explicit states");
    const OracleSolution o = solve_full_oracle(*ensemble, inst.reward(), opts.solver);
    rep.alpha = o.value;
    rep.oracle = o.diagnostics;
  }
  if (opts.primal) {
    const ReducedPrimalSolution p = solve_reduced_primal(inst, opts.solver);
    rep.alpha_prime = p.value;
    rep.primal = p.diagnostics;
    if (p.deflated) rep.notes.push_back("Gram deflated to rank " + std::to_string(p.rank));
  }
  const bool finite = !inst.reward().has_mask();
  if (opts.dual) {
    if (finite) {
      const DualSolution d = solve_reduced_dual(inst, opts.solver);
      rep.beta_prime = d.value;
      rep.dual = d.diagnostics;
      rep.dual_parameters = d.num_parameters;
    } else {
      rep.notes.push_back("dual skipped: masked reward");
    }
  }
  if (opts.heuristic != Heuristic::none) {
    if (!finite) {
      rep.notes.push_back("heuristic skipped: masked reward");
    } else {
      DualSolution h;
      switch (opts.heuristic) {
        case Heuristic::toeplitz: h = solve_heuristic_toeplitz(inst, opts.solver); break;
        case Heuristic::pattern_2cp:
          h = solve_heuristic_structured(inst, ChangePointPattern::two, opts.horizon, opts.solver);
          break;
        case Heuristic::pattern_3cp:
          h = solve_heuristic_structured(inst, ChangePointPattern::three, opts.horizon, opts.solver);
          break;
        case Heuristic::none: break;
      }
      rep.beta_double_prime = h.value;
      rep.heuristic = h.diagnostics;
      rep.heuristic_parameters = h.num_parameters;
      for (auto& note : h.notes) rep.notes.push_back(note);
    }
  }
  return rep;
}

}  // namespace qsd
