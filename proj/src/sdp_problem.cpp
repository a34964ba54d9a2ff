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
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qsd/sdp.hpp"

namespace qsd {

PsdCheck check_psd(const MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("check_psd: matrix is not square");
  if (m.size() == 0) return {true, std::numeric_limits<double>::infinity()};
  const MatrixXd h = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  return {lo >= -tol, lo};
}

PsdCheck check_psd(const MatrixXc& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("check_psd: matrix is not square");
  if (m.size() == 0) return {true, std::numeric_limits<double>::infinity()};
  const MatrixXc h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  return {lo >= -tol, lo};
}

double hermitian_defect(const MatrixXc& m) {
  if (m.rows() != m.cols()) throw DimensionError("hermitian_defect: matrix is not square");
  return m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double symmetric_defect(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("symmetric_defect: matrix is not square");
  return m.size() == 0 ? 0.0 : (m - m.transpose()).cwiseAbs().maxCoeff();
}

bool is_effectively_real(const MatrixXc& m, double tol) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() <= tol;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible_or_unbounded: return "infeasible_or_unbounded";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

constexpr double kSymmetryTolerance = 1e-12;

template <class Entry>
void check_entry(const Entry& e, const std::vector<int>& blocks, std::size_t p) {
  if (e.block < 0 || e.block >= static_cast<int>(blocks.size())) {
    throw DimensionError("constraint " + std::to_string(p) + ": block index out of range");
  }
  const int n = blocks[static_cast<std::size_t>(e.block)];
  if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) {
    throw DimensionError("constraint " + std::to_string(p) + ": entry outside its block");
  }
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

void SdpProblem::validate() const {
  if (objective.size() != blocks.size()) {
    throw DimensionError("SdpProblem: objective block count differs from block list");
  }
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (blocks[k] < 1) throw DimensionError("SdpProblem: block dimensions must be positive");
    if (objective[k].rows() != blocks[k] || objective[k].cols() != blocks[k]) {
      throw DimensionError("SdpProblem: objective block " + std::to_string(k) + " has wrong shape");
    }
    if (!objective[k].allFinite()) throw InvariantViolation("SdpProblem: non-finite objective entry");
    if (symmetric_defect(objective[k]) > kSymmetryTolerance) {
      throw InvariantViolation("SdpProblem: objective block " + std::to_string(k) + " is not symmetric");
    }
  }
  for (std::size_t p = 0; p < constraints.size(); ++p) {
    if (!std::isfinite(constraints[p].rhs)) throw InvariantViolation("SdpProblem: non-finite rhs");
    for (const auto& e : constraints[p].entries) {
      check_entry(e, blocks, p);
      if (!std::isfinite(e.value)) throw InvariantViolation("SdpProblem: non-finite constraint entry");
    }
  }
}

void ComplexSdpProblem::validate() const {
  if (objective.size() != blocks.size()) {
    throw DimensionError("ComplexSdpProblem: objective block count differs from block list");
  }
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (blocks[k] < 1) throw DimensionError("ComplexSdpProblem: block dimensions must be positive");
    if (objective[k].rows() != blocks[k] || objective[k].cols() != blocks[k]) {
      throw DimensionError("ComplexSdpProblem: objective block " + std::to_string(k) + " has wrong shape");
    }
    if (!objective[k].allFinite()) throw InvariantViolation("ComplexSdpProblem: non-finite objective");
    if (hermitian_defect(objective[k]) > kSymmetryTolerance) {
      throw InvariantViolation("ComplexSdpProblem: objective block " + std::to_string(k) +
                               " is not Hermitian");
    }
  }
  for (std::size_t p = 0; p < constraints.size(); ++p) {
    if (!std::isfinite(constraints[p].rhs)) throw InvariantViolation("ComplexSdpProblem: non-finite rhs");
    for (const auto& e : constraints[p].entries) {
      check_entry(e, blocks, p);
      if (!finite(e.value)) throw InvariantViolation("ComplexSdpProblem: non-finite constraint entry");
      if (e.row == e.col && std::abs(e.value.imag()) > kSymmetryTolerance) {
        throw InvariantViolation("ComplexSdpProblem: diagonal constraint entry is not real");
      }
    }
  }
}

bool ComplexSdpProblem::is_real(double tol) const {
  for (const auto& c : objective) {
    if (!is_effectively_real(c, tol)) return false;
  }
  for (const auto& c : constraints) {
    for (const auto& e : c.entries) {
      if (std::abs(e.value.imag()) > tol) return false;
    }
  }
  return true;
}

MatrixXd embed_hermitian_matrix(const MatrixXc& h) {
  const Eigen::Index n = h.rows();
  MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.bottomRightCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  return out;
}

MatrixXc recover_hermitian_matrix(const MatrixXd& y) {
  if (y.rows() != y.cols() || y.rows() % 2 != 0) {
    throw DimensionError("recover_hermitian_matrix: expected an even square matrix");
  }
  const Eigen::Index n = y.rows() / 2;
  MatrixXc out(n, n);
  out.real() = 0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
  out.imag() = 0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
  return out;
}

SdpProblem embed_hermitian(const ComplexSdpProblem& p) {
  p.validate();
  SdpProblem out;
  out.sense = p.sense;
  out.blocks.reserve(p.blocks.size());
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    out.blocks.push_back(2 * p.blocks[k]);
    out.objective.push_back(0.5 * embed_hermitian_matrix(p.objective[k]));
  }
  out.constraints.reserve(p.constraints.size());
  for (const auto& c : p.constraints) {
    LinearConstraint lc;
    lc.rhs = c.rhs;
    lc.entries.reserve(4 * c.entries.size());
    for (const auto& e : c.entries) {
      const int n = p.blocks[static_cast<std::size_t>(e.block)];
      int r = e.row, s = e.col;
      Complex v = e.value;
      if (r > s) {
        std::swap(r, s);
        v = std::conj(v);
      }
      const double re = 0.5 * v.real(), im = 0.5 * v.imag();
      lc.entries.push_back({e.block, r, s, re});
      lc.entries.push_back({e.block, r + n, s + n, re});
      if (r != s && im != 0.0) {
        lc.entries.push_back({e.block, r, s + n, -im});
        lc.entries.push_back({e.block, s, r + n, im});
      }
    }
    out.constraints.push_back(std::move(lc));
  }
  return out;
}

ComplexSdpSolution solve(const ComplexSdpProblem& p, const SolverOptions& opts) {
  p.validate();
  ComplexSdpSolution out;
  if (p.is_real()) {
    SdpProblem r;
    r.sense = p.sense;
    r.blocks = p.blocks;
    for (const auto& c : p.objective) r.objective.push_back(c.real());
    for (const auto& c : p.constraints) {
      LinearConstraint lc;
      lc.rhs = c.rhs;
      for (const auto& e : c.entries) lc.entries.push_back({e.block, e.row, e.col, e.value.real()});
      r.constraints.push_back(std::move(lc));
    }
    out.real = solve(r, opts);
    for (const auto& x : out.real.primal_X) out.primal_X.push_back(x.cast<Complex>());
    for (const auto& z : out.real.dual_slack_Z) out.dual_slack_Z.push_back(z.cast<Complex>());
    return out;
  }
  out.embedded = true;
  out.real = solve(embed_hermitian(p), opts);
  for (const auto& x : out.real.primal_X) out.primal_X.push_back(recover_hermitian_matrix(x));
  for (const auto& z : out.real.dual_slack_Z) out.dual_slack_Z.push_back(2.0 * recover_hermitian_matrix(z));
  return out;
}

// Format:
//   qsd-sdp 1
//   sense minimize|maximize
//   blocks <count> <n_1> ... <n_k>
//   objective                       followed by each block as n rows of n numbers
//   constraints <m>
//   constraint <p> rhs <b> blocks <t>   then t times: block <k> and n rows
//   end

namespace {

void write_dense(std::ostream& out, const MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
}

MatrixXd read_dense(std::istream& in, int n) {
  MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!(in >> m(i, j))) throw InvalidArgument("read_problem: truncated matrix");
    }
  }
  return m;
}

void expect(std::istream& in, const std::string& word) {
  std::string tok;
  if (!(in >> tok) || tok != word) {
    throw InvalidArgument("read_problem: expected '" + word + "', got '" + tok + "'");
  }
}

}  // namespace

void write_problem(std::ostream& out, const SdpProblem& p) {
  const auto old = out.precision(17);
  out << "qsd-sdp 1\n";
  out << "sense " << (p.sense == Sense::minimize ? "minimize" : "maximize") << '\n';
  out << "blocks " << p.blocks.size();
  for (int n : p.blocks) out << ' ' << n;
  out << "\nobjective\n";
  for (const auto& c : p.objective) write_dense(out, c);
  out << "constraints " << p.constraints.size() << '\n';
  for (std::size_t q = 0; q < p.constraints.size(); ++q) {
    std::map<int, MatrixXd> dense;
    for (const auto& e : p.constraints[q].entries) {
      const int n = p.blocks[static_cast<std::size_t>(e.block)];
      auto it = dense.try_emplace(e.block, MatrixXd::Zero(n, n)).first;
      it->second(e.row, e.col) += e.value;
      if (e.row != e.col) it->second(e.col, e.row) += e.value;
    }
    out << "constraint " << q << " rhs " << p.constraints[q].rhs << " blocks " << dense.size() << '\n';
    for (const auto& [k, m] : dense) {
      out << "block " << k << '\n';
      write_dense(out, m);
    }
  }
  out << "end\n";
  out.precision(old);
}

SdpProblem read_problem(std::istream& in) {
  SdpProblem p;
  expect(in, "qsd-sdp");
  int version = 0;
  in >> version;
  if (version != 1) throw InvalidArgument("read_problem: unsupported version");
  expect(in, "sense");
  std::string sense;
  in >> sense;
  if (sense == "minimize") {
    p.sense = Sense::minimize;
  } else if (sense == "maximize") {
    p.sense = Sense::maximize;
  } else {
    throw InvalidArgument("read_problem: unknown sense '" + sense + "'");
  }
  expect(in, "blocks");
  std::size_t count = 0;
  in >> count;
  p.blocks.resize(count);
  for (auto& n : p.blocks) {
    if (!(in >> n) || n < 1) throw InvalidArgument("read_problem: bad block size");
  }
  expect(in, "objective");
  for (int n : p.blocks) p.objective.push_back(read_dense(in, n));
  expect(in, "constraints");
  std::size_t m = 0;
  in >> m;
  p.constraints.resize(m);
  for (std::size_t q = 0; q < m; ++q) {
    expect(in, "constraint");
    std::size_t index = 0;
    in >> index;
    if (index != q) throw InvalidArgument("read_problem: constraints out of order");
    expect(in, "rhs");
    in >> p.constraints[q].rhs;
    expect(in, "blocks");
    std::size_t t = 0;
    in >> t;
    for (std::size_t s = 0; s < t; ++s) {
      expect(in, "block");
      int k = -1;
      in >> k;
      if (k < 0 || k >= static_cast<int>(p.blocks.size())) {
        throw InvalidArgument("read_problem: block index out of range");
      }
      const MatrixXd a = read_dense(in, p.blocks[static_cast<std::size_t>(k)]);
      for (int i = 0; i < a.rows(); ++i) {
        for (int j = i; j < a.cols(); ++j) {
          if (a(i, j) != 0.0) p.constraints[q].entries.push_back({k, i, j, a(i, j)});
        }
      }
    }
  }
  expect(in, "end");
  p.validate();
  return p;
}

void write_solution(std::ostream& out, const SdpSolution& s) {
  const auto old = out.precision(17);
  out << "qsd-sdp-solution 1\n";
  out << "status " << to_string(s.status) << '\n';
  out << "iterations " << s.iterations << '\n';
  out << "primal_value " << s.primal_value << '\n';
  out << "dual_value " << s.dual_value << '\n';
  out << "gap " << s.gap << '\n';
  out << "primal_residual " << s.primal_residual << '\n';
  out << "dual_residual " << s.dual_residual << '\n';
  out << "complementarity " << s.complementarity << '\n';
  out << "y " << s.dual_y.size();
  for (Eigen::Index i = 0; i < s.dual_y.size(); ++i) out << ' ' << s.dual_y(i);
  out << "\nX " << s.primal_X.size() << '\n';
  for (const auto& x : s.primal_X) {
    out << "block " << x.rows() << '\n';
    write_dense(out, x);
  }
  out << "Z " << s.dual_slack_Z.size() << '\n';
  for (const auto& z : s.dual_slack_Z) {
    out << "block " << z.rows() << '\n';
    write_dense(out, z);
  }
  out << "end\n";
  out.precision(old);
}

}  // namespace qsd
