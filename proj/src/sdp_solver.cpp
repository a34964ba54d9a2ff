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

// Infeasible primal-dual path following with the HKM direction and a
// Mehrotra predictor-corrector step.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "qsd/sdp.hpp"

namespace qsd {
namespace {

using Blocks = std::vector<MatrixXd>;

// w * (E_ab + E_ba); a diagonal coefficient v is stored as w = v / 2.
struct Term {
  int a;
  int b;
  double w;
};

struct Slice {
  int constraint;
  int begin;
  int end;
};

struct BlockStructure {
  std::vector<Term> terms;
  std::vector<Slice> slices;  // sorted by constraint
  bool unit = false;
  std::vector<int> unit_a, unit_b, unit_constraint;
  std::vector<double> unit_w;
  // Maximal stretches of consecutive constraints over (a, b0 + t).
  struct Run {
    int start;
    int length;
    int a;
    int b0;
    int c0;
  };
  std::vector<Run> runs;
};

class Operator {
 public:
  Operator(const SdpProblem& p) : blocks_(p.blocks), m_(static_cast<int>(p.constraints.size())) {
    structure_.resize(blocks_.size());
    std::vector<std::vector<Term>> scratch(blocks_.size());
    for (int q = 0; q < m_; ++q) {
      for (auto& s : scratch) s.clear();
      for (const auto& e : p.constraints[static_cast<std::size_t>(q)].entries) {
        if (e.value == 0.0) continue;
        const int a = std::min(e.row, e.col), b = std::max(e.row, e.col);
        scratch[static_cast<std::size_t>(e.block)].push_back({a, b, a == b ? 0.5 * e.value : e.value});
      }
      for (std::size_t k = 0; k < blocks_.size(); ++k) {
        if (scratch[k].empty()) continue;
        auto& bs = structure_[k];
        const int begin = static_cast<int>(bs.terms.size());
        bs.terms.insert(bs.terms.end(), scratch[k].begin(), scratch[k].end());
        bs.slices.push_back({q, begin, static_cast<int>(bs.terms.size())});
      }
    }
    for (auto& bs : structure_) {
      bs.unit = std::all_of(bs.slices.begin(), bs.slices.end(),
                            [](const Slice& s) { return s.end - s.begin == 1; });
      if (!bs.unit) continue;
      for (const auto& s : bs.slices) {
        const Term& t = bs.terms[static_cast<std::size_t>(s.begin)];
        bs.unit_a.push_back(t.a);
        bs.unit_b.push_back(t.b);
        bs.unit_w.push_back(t.w);
        bs.unit_constraint.push_back(s.constraint);
      }
      for (std::size_t i = 0; i < bs.slices.size(); ++i) {
        const int a = bs.unit_a[i], b = bs.unit_b[i], c = bs.unit_constraint[i];
        if (!bs.runs.empty()) {
          auto& r = bs.runs.back();
          if (r.a == a && r.b0 + r.length == b && r.c0 + r.length == c) {
            ++r.length;
            continue;
          }
        }
        bs.runs.push_back({static_cast<int>(i), 1, a, b, c});
      }
    }
  }

  int m() const { return m_; }
  const std::vector<BlockStructure>& structure() const { return structure_; }

  VectorXd apply(const Blocks& k) const {
    VectorXd out = VectorXd::Zero(m_);
    for (std::size_t blk = 0; blk < structure_.size(); ++blk) {
      const MatrixXd& km = k[blk];
      const auto& bs = structure_[blk];
      for (const auto& s : bs.slices) {
        double acc = 0.0;
        for (int t = s.begin; t < s.end; ++t) {
          const Term& tm = bs.terms[static_cast<std::size_t>(t)];
          acc += tm.w * (km(tm.a, tm.b) + km(tm.b, tm.a));
        }
        out(s.constraint) += acc;
      }
    }
    return out;
  }

  Blocks adjoint(const VectorXd& y) const {
    Blocks out;
    out.reserve(blocks_.size());
    for (std::size_t blk = 0; blk < structure_.size(); ++blk) {
      MatrixXd mm = MatrixXd::Zero(blocks_[blk], blocks_[blk]);
      const auto& bs = structure_[blk];
      for (const auto& s : bs.slices) {
        const double yq = y(s.constraint);
        if (yq == 0.0) continue;
        for (int t = s.begin; t < s.end; ++t) {
          const Term& tm = bs.terms[static_cast<std::size_t>(t)];
          mm(tm.a, tm.b) += tm.w * yq;
          mm(tm.b, tm.a) += tm.w * yq;
        }
      }
      out.push_back(std::move(mm));
    }
    return out;
  }

  // Upper triangle of M_pq = tr(A_p X A_q Z^{-1}).
  void schur(const Blocks& x, const Blocks& zinv, MatrixXd& m) const {
    m.setZero(m_, m_);
    for (std::size_t blk = 0; blk < structure_.size(); ++blk) {
      const auto& bs = structure_[blk];
      if (bs.slices.empty()) continue;
      if (bs.unit) {
        schur_unit(bs, x[blk], zinv[blk], m);
      } else {
        schur_general(bs, blocks_[blk], x[blk], zinv[blk], m);
      }
    }
  }

 private:
  // Every constraint touching the block does so through a single term.
  static void schur_unit(const BlockStructure& bs, const MatrixXd& xm, const MatrixXd& zm, MatrixXd& m) {
    const Eigen::Index n = xm.rows();
    const double* X = xm.data();
    const double* Zi = zm.data();
    const std::size_t count = bs.slices.size();
    const int* ia = bs.unit_a.data();
    const int* ib = bs.unit_b.data();
    const double* iw = bs.unit_w.data();
    const int* ic = bs.unit_constraint.data();
    for (std::size_t iq = 0; iq < count; ++iq) {
      const int c = ia[iq], d = ib[iq];
      const double wq = iw[iq];
      const double* __restrict zc = Zi + c * n;
      const double* __restrict zd = Zi + d * n;
      const double* __restrict xc = X + c * n;
      const double* __restrict xd = X + d * n;
      double* __restrict col = m.col(ic[iq]).data();
      for (const auto& r : bs.runs) {
        if (r.start > static_cast<int>(iq)) break;
        const int len = std::min(r.length, static_cast<int>(iq) - r.start + 1);
        const int a = r.a;
        const double k1 = wq * xd[a], k2 = wq * xc[a], k3 = wq * zc[a], k4 = wq * zd[a];
        const double* __restrict w = iw + r.start;
        const double* __restrict zcb = zc + r.b0;
        const double* __restrict zdb = zd + r.b0;
        const double* __restrict xdb = xd + r.b0;
        const double* __restrict xcb = xc + r.b0;
        double* __restrict out = col + r.c0;
        for (int t = 0; t < len; ++t) {
          out[t] += w[t] * (k1 * zcb[t] + k2 * zdb[t] + k3 * xdb[t] + k4 * xcb[t]);
        }
      }
    }
  }

  static void schur_general(const BlockStructure& bs, int n, const MatrixXd& xm, const MatrixXd& zm,
                            MatrixXd& m) {
    const double* X = xm.data();
    const double* Zi = zm.data();
    const double dense_cost = 2.0 * n * double(n) * n;
    MatrixXd t(n, n), kk(n, n);
    double prefix = 0.0;
    for (std::size_t iq = 0; iq < bs.slices.size(); ++iq) {
      const Slice& sq = bs.slices[iq];
      const double nq = sq.end - sq.begin;
      prefix += nq;
      double* col = m.col(sq.constraint).data();
      if (4.0 * nq * prefix > dense_cost) {
        t.setZero();
        for (int u = sq.begin; u < sq.end; ++u) {
          const Term& tq = bs.terms[static_cast<std::size_t>(u)];
          t.row(tq.a) += tq.w * zm.row(tq.b);
          t.row(tq.b) += tq.w * zm.row(tq.a);
        }
        kk.noalias() = xm * t;
        for (std::size_t ip = 0; ip <= iq; ++ip) {
          const Slice& sp = bs.slices[ip];
          double acc = 0.0;
          for (int u = sp.begin; u < sp.end; ++u) {
            const Term& tp = bs.terms[static_cast<std::size_t>(u)];
            acc += tp.w * (kk(tp.a, tp.b) + kk(tp.b, tp.a));
          }
          col[sp.constraint] += acc;
        }
        continue;
      }
      for (std::size_t ip = 0; ip <= iq; ++ip) {
        const Slice& sp = bs.slices[ip];
        double acc = 0.0;
        for (int v = sq.begin; v < sq.end; ++v) {
          const Term& tq = bs.terms[static_cast<std::size_t>(v)];
          const int c = tq.a, d = tq.b;
          const double* zc = Zi + static_cast<std::ptrdiff_t>(c) * n;
          const double* zd = Zi + static_cast<std::ptrdiff_t>(d) * n;
          const double* xc = X + static_cast<std::ptrdiff_t>(c) * n;
          const double* xd = X + static_cast<std::ptrdiff_t>(d) * n;
          double inner = 0.0;
          for (int u = sp.begin; u < sp.end; ++u) {
            const Term& tp = bs.terms[static_cast<std::size_t>(u)];
            const int a = tp.a, b = tp.b;
            inner += tp.w * (zc[b] * xd[a] + zd[b] * xc[a] + zc[a] * xd[b] + zd[a] * xc[b]);
          }
          acc += tq.w * inner;
        }
        col[sp.constraint] += acc;
      }
    }
  }

  std::vector<int> blocks_;
  int m_;
  std::vector<BlockStructure> structure_;
};

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double frob(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

void symmetrize(MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

// Largest alpha with x + alpha * dx psd, given the Cholesky factor of x.
double max_step(const std::vector<Eigen::LLT<MatrixXd>>& chol, const Blocks& dx) {
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < dx.size(); ++k) {
    const auto l = chol[k].matrixL();
    MatrixXd w = l.solve(dx[k]);
    w = l.solve(w.transpose()).eval();
    symmetrize(w);
    double lo;
    if (w.rows() == 1) {
      lo = w(0, 0);
    } else {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(w, Eigen::EigenvaluesOnly);
      lo = es.eigenvalues()(0);
    }
    if (lo < 0.0) step = std::min(step, -1.0 / lo);
  }
  return step;
}

bool factor(const Blocks& x, std::vector<Eigen::LLT<MatrixXd>>& chol) {
  chol.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    chol[k].compute(x[k]);
    if (chol[k].info() != Eigen::Success) return false;
  }
  return true;
}

double min_eig(const Blocks& x) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& m : x) lo = std::min(lo, check_psd(m, 0.0).min_eigenvalue);
  return lo;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& opts) {
  problem.validate();
  const bool maximize = problem.sense == Sense::maximize;
  const double sign = maximize ? -1.0 : 1.0;
  const std::size_t nb = problem.blocks.size();
  const int m = static_cast<int>(problem.constraints.size());

  Blocks c(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    c[k] = sign * problem.objective[k];
    symmetrize(c[k]);
  }
  VectorXd b(m);
  for (int p = 0; p < m; ++p) b(p) = problem.constraints[static_cast<std::size_t>(p)].rhs;

  const Operator op(problem);

  double data_max = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
  for (const auto& ck : c) data_max = std::max(data_max, ck.cwiseAbs().maxCoeff());
  for (const auto& con : problem.constraints) {
    for (const auto& e : con.entries) data_max = std::max(data_max, std::abs(e.value));
  }
  const double tau = 1.0 + data_max;
  const double norm_b = b.norm();
  const double norm_c = frob(c);

  int total_dim = 0;
  for (int n : problem.blocks) total_dim += n;

  Blocks x(nb), z(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    x[k] = tau * MatrixXd::Identity(problem.blocks[k], problem.blocks[k]);
    z[k] = x[k];
  }
  VectorXd y = VectorXd::Zero(m);

  SdpSolution sol;
  MatrixXd schur(m, m);
  std::vector<Eigen::LLT<MatrixXd>> chol_x, chol_z;
  Blocks zinv(nb);
  double reg = 0.0;  // raised only when the plain factorization fails
  int stalled = 0;
  bool warned_reg = false;

  auto finish = [&](SolveStatus status, double pobj, double dobj, double pres, double dres, int it) {
    sol.status = status;
    sol.iterations = it;
    sol.primal_value = sign * pobj;
    sol.dual_value = sign * dobj;
    sol.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.complementarity = inner(x, z);
    sol.primal_X = x;
    sol.dual_slack_Z = z;
    sol.dual_y = sign * y;
    sol.min_eig_X = min_eig(x);
    sol.min_eig_Z = min_eig(z);
    return sol;
  };

  if (opts.log) {
    *opts.log << "iter      pobj            dobj           pres       dres       gap        mu\n";
  }

  for (int it = 0;; ++it) {
    const VectorXd ax = op.apply(x);
    const VectorXd rp = b - ax;
    Blocks rd = op.adjoint(y);
    for (std::size_t k = 0; k < nb; ++k) rd[k] = c[k] - z[k] - rd[k];
    const double pobj = inner(c, x);
    const double dobj = b.dot(y);
    const double xz = inner(x, z);
    const double mu = xz / total_dim;
    const double pres = rp.norm() / (1.0 + norm_b);
    const double dres = frob(rd) / (1.0 + norm_c);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));

    if (opts.log) {
      *opts.log << std::setw(4) << it << std::scientific << std::setprecision(8) << std::setw(16)
                << sign * pobj << std::setw(16) << sign * dobj << std::setprecision(2) << std::setw(11)
                << pres << std::setw(11) << dres << std::setw(11) << gap << std::setw(11) << mu << '\n'
                << std::defaultfloat;
    }

    if (pres <= opts.tolerance && dres <= opts.tolerance) {
      sol.weak_duality_violation = std::max(sol.weak_duality_violation, dobj - pobj);
    }
    if (pres <= opts.tolerance && dres <= opts.tolerance && gap <= opts.tolerance &&
        xz <= opts.tolerance * (1.0 + std::abs(pobj))) {
      return finish(SolveStatus::optimal, pobj, dobj, pres, dres, it);
    }
    const double blowup = 1e10 * tau;
    if (frob(x) > blowup || y.cwiseAbs().maxCoeff() > blowup || frob(z) > blowup) {
      return finish(SolveStatus::infeasible_or_unbounded, pobj, dobj, pres, dres, it);
    }
    if (it >= opts.max_iterations) {
      return finish(SolveStatus::max_iterations, pobj, dobj, pres, dres, it);
    }
    if (!factor(x, chol_x) || !factor(z, chol_z)) {
      sol.warnings.push_back("iterate lost positive definiteness");
      return finish(SolveStatus::numerical_failure, pobj, dobj, pres, dres, it);
    }
    for (std::size_t k = 0; k < nb; ++k) {
      zinv[k] = chol_z[k].solve(MatrixXd::Identity(problem.blocks[k], problem.blocks[k]));
      symmetrize(zinv[k]);
    }

    op.schur(x, zinv, schur);
    const double diag_max = m ? schur.diagonal().cwiseAbs().maxCoeff() : 0.0;
    std::optional<Eigen::LLT<MatrixXd, Eigen::Upper>> llt;
    for (;;) {
      if (reg == 0.0) {
        llt.emplace(schur);
      } else {
        MatrixXd reg_schur = schur;
        reg_schur.diagonal().array() += reg * std::max(1.0, diag_max);
        llt.emplace(reg_schur);
      }
      if (llt->info() == Eigen::Success) break;
      reg = reg == 0.0 ? opts.regularization : reg * 100.0;
      if (!warned_reg) {
        sol.warnings.push_back("Schur complement regularized for near-dependent constraints");
        warned_reg = true;
      }
      if (reg > 1e-6) {
        sol.warnings.push_back("Schur complement not positive definite");
        return finish(SolveStatus::numerical_failure, pobj, dobj, pres, dres, it);
      }
    }

    Blocks xrz(nb);
    for (std::size_t k = 0; k < nb; ++k) xrz[k] = x[k] * rd[k] * zinv[k];
    const VectorXd a_xrz = op.apply(xrz);

    // g is the non-symmetric complementarity target; dX = g - X dZ Z^{-1}.
    // Refinement runs against the operator itself: M is formed with heavy
    // cancellation once Z^{-1} is large, so A(dX) = rp is re-imposed directly.
    auto direction = [&](const Blocks& g, Blocks& dx, Blocks& dz, VectorXd& dy) {
      const VectorXd rhs = rp - op.apply(g) + a_xrz;
      dy = llt->solve(rhs);
      dz = op.adjoint(dy);
      dx.resize(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        dz[k] = rd[k] - dz[k];
        symmetrize(dz[k]);
        dx[k] = g[k] - x[k] * dz[k] * zinv[k];
        symmetrize(dx[k]);
      }
      for (int pass = 0; pass < 2; ++pass) {
        const VectorXd r = rp - op.apply(dx);
        if (r.norm() <= 1e-15 * (1.0 + norm_b)) break;
        const VectorXd delta = llt->solve(r);
        dy += delta;
        const Blocks at = op.adjoint(delta);
        for (std::size_t k = 0; k < nb; ++k) {
          dz[k] -= at[k];
          symmetrize(dz[k]);
          dx[k] += x[k] * at[k] * zinv[k];
          symmetrize(dx[k]);
        }
      }
    };

    Blocks g(nb), dx, dz;
    VectorXd dy;
    for (std::size_t k = 0; k < nb; ++k) g[k] = -x[k];
    direction(g, dx, dz, dy);
    const double ap_aff = std::min(1.0, max_step(chol_x, dx));
    const double ad_aff = std::min(1.0, max_step(chol_z, dz));
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      mu_aff += (x[k] + ap_aff * dx[k]).cwiseProduct(z[k] + ad_aff * dz[k]).sum();
    }
    mu_aff /= total_dim;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    for (std::size_t k = 0; k < nb; ++k) {
      g[k] = sigma * mu * zinv[k] - x[k] - dx[k] * dz[k] * zinv[k];
    }
    direction(g, dx, dz, dy);
    const double ap = std::min(1.0, opts.step_fraction * max_step(chol_x, dx));
    const double ad = std::min(1.0, opts.step_fraction * max_step(chol_z, dz));

    for (std::size_t k = 0; k < nb; ++k) {
      x[k] += ap * dx[k];
      z[k] += ad * dz[k];
      symmetrize(x[k]);
      symmetrize(z[k]);
    }
    y += ad * dy;

    stalled = (ap < 1e-10 && ad < 1e-10) ? stalled + 1 : 0;
    if (stalled >= 3) {
      sol.warnings.push_back("step length collapsed");
      return finish(SolveStatus::numerical_failure, inner(c, x), b.dot(y), pres, dres, it + 1);
    }
  }
}

}  // namespace qsd
