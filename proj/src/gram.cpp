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

#include "qsd/gram.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace qsd {

GramMatrix::GramMatrix(MatrixXc entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw DimensionError("GramMatrix: entries must be a nonempty square matrix");
  }
  if (!entries_.allFinite()) {
    throw InvariantViolation("GramMatrix: non-finite entry");
  }
  if (hermitian_defect(entries_) > kSymmetryTolerance) {
    throw InvariantViolation("GramMatrix: entries are not Hermitian");
  }
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    if (std::abs(entries_(i, i) - 1.0) > kDiagonalTolerance) {
      throw InvariantViolation("GramMatrix: diagonal entry differs from 1");
    }
  }
  const PsdCheck psd = check_psd(entries_, kPsdTolerance);
  min_eigenvalue_ = psd.min_eigenvalue;
  if (!psd.is_psd) {
    std::ostringstream msg;
    msg << "GramMatrix: not positive semidefinite (min eigenvalue " << psd.min_eigenvalue << ")";
    throw InvariantViolation(msg.str());
  }
}

GramMatrix gram_from_ensemble(const StateEnsemble& ensemble) {
  const MatrixXc& psi = ensemble.state_matrix();
  MatrixXc g = psi.adjoint() * psi;
  // Exact symmetry and unit diagonal; the product only differs by rounding.
  g = (0.5 * (g + g.adjoint())).eval();
  for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, i) = 1.0;
  return GramMatrix(std::move(g));
}

GramMatrix gram_sequences_general(const OverlapTable& table, const ChangeIndexSet& idx) {
  if (table.num_changes() != idx.num_changes()) {
    throw InvalidArgument("gram_sequences_general: overlap table size does not match P + 1");
  }
  const int horizon = idx.horizon();
  const auto n = static_cast<Eigen::Index>(idx.size());

  // Symbol occupying each slot, per sequence.
  std::vector<std::vector<int>> symbols(idx.size(), std::vector<int>(horizon));
  for (std::size_t s = 0; s < idx.size(); ++s) {
    for (int t = 1; t <= horizon; ++t) symbols[s][t - 1] = symbol_at(idx[s], t);
  }

  MatrixXc g(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    g(a, a) = 1.0;
    for (Eigen::Index b = a + 1; b < n; ++b) {
      Complex prod = 1.0;
      const auto& sa = symbols[a];
      const auto& sb = symbols[b];
      for (int t = 0; t < horizon; ++t) {
        if (sa[t] != sb[t]) prod *= table.values(sa[t], sb[t]);
      }
      g(a, b) = prod;
      g(b, a) = std::conj(prod);
    }
  }
  return GramMatrix(std::move(g));
}

GramMatrix gram_1cp(double gamma, int horizon) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidArgument("gram_1cp: gamma must lie in [0, 1]");
  }
  if (horizon < 1) throw InvalidArgument("gram_1cp: horizon must be positive");
  MatrixXc g(horizon, horizon);
  for (int i = 0; i < horizon; ++i) {
    for (int j = 0; j < horizon; ++j) g(i, j) = std::pow(gamma, std::abs(i - j));
  }
  return GramMatrix(std::move(g));
}

namespace {

void require_nonnegative_table(const OverlapTable& table, int num_changes, const char* who) {
  if (table.num_changes() != num_changes) {
    throw InvalidArgument(std::string(who) + ": overlap table has the wrong number of symbols");
  }
  if (!table.is_nonnegative_real()) {
    throw InvalidArgument(std::string(who) +
                          ": closed form needs real nonnegative overlaps; use gram_sequences_general");
  }
}

double ipow(double base, int exponent) { return std::pow(base, std::abs(exponent)); }

}  // namespace

GramMatrix gram_2cp(const OverlapTable& table, int horizon) {
  require_nonnegative_table(table, 2, "gram_2cp");
  const double g1 = table.gamma(1);
  const double g2 = table.gamma(2);
  const double g12 = table.gamma(1, 2);
  const ChangeIndexSet idx = enumerate_change_indices(horizon, 2);
  const auto n = static_cast<Eigen::Index>(idx.size());
  MatrixXc g(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      // Lexicographic order guarantees i <= k.
      const int i = idx[a][0], j = idx[a][1];
      const int k = idx[b][0], l = idx[b][1];
      double v;
      if (j < k) {
        v = ipow(g1, i - j) * ipow(g2, j - k) * ipow(g12, k - l);
      } else {
        v = ipow(g1, i - k) * ipow(g12, j - l);
      }
      g(a, b) = v;
      g(b, a) = v;
    }
  }
  return GramMatrix(std::move(g));
}

int gram_3cp_case(const ChangeIndex& a, const ChangeIndex& b) {
  const bool swap = b[0] < a[0];
  const ChangeIndex& row = swap ? b : a;
  const ChangeIndex& col = swap ? a : b;
  const int j = row[1], k = row[2];
  const int l = col[0], m = col[1], n = col[2];
  if (l <= j && j <= k && k <= m) return 1;
  if (l <= j && j <= n && k > m) return 2;
  if (l <= m && m <= n && n < j && j <= k) return 3;
  if (j < l && l <= k && k <= m) return 4;
  if (j < l && l <= k && k > m) return 5;
  if (j <= k && k < l) return 6;
  throw InvalidArgument("gram_3cp_case: pair not covered by any branch");
}

GramMatrix gram_3cp(const OverlapTable& table, int horizon) {
  require_nonnegative_table(table, 3, "gram_3cp");
  const double g1 = table.gamma(1), g2 = table.gamma(2), g3 = table.gamma(3);
  const double g12 = table.gamma(1, 2), g13 = table.gamma(1, 3), g23 = table.gamma(2, 3);
  const ChangeIndexSet idx = enumerate_change_indices(horizon, 3);
  const auto size = static_cast<Eigen::Index>(idx.size());
  MatrixXc g(size, size);
  for (Eigen::Index a = 0; a < size; ++a) {
    for (Eigen::Index b = a; b < size; ++b) {
      const int i = idx[a][0], j = idx[a][1], k = idx[a][2];
      const int l = idx[b][0], m = idx[b][1], n = idx[b][2];
      double v = 0.0;
      switch (gram_3cp_case(idx[a], idx[b])) {
        case 1:
          v = ipow(g1, i - l) * ipow(g12, j - k) * ipow(g13, k - m) * ipow(g23, m - n);
          break;
        case 2:
          v = ipow(g1, i - l) * ipow(g12, j - m) * ipow(g23, k - n);
          break;
        case 3:
          // The phi_2 / phi_3 stretch between j and k contributes gamma_23^{|k-j|}.
          v = ipow(g1, i - l) * ipow(g12, m - n) * ipow(g13, n - j) * ipow(g23, k - j);
          break;
        case 4:
          v = ipow(g1, i - j) * ipow(g2, j - l) * ipow(g12, l - k) * ipow(g13, k - m) *
              ipow(g23, m - n);
          break;
        case 5:
          // Slots between m and k pair phi_2 with phi_2, then phi_2 with phi_3.
          v = ipow(g1, i - j) * ipow(g2, j - l) * ipow(g12, l - m) * ipow(g23, k - n);
          break;
        case 6:
          v = ipow(g1, i - j) * ipow(g2, j - k) * ipow(g3, k - l) * ipow(g13, l - m) *
              ipow(g23, m - n);
          break;
      }
      g(a, b) = v;
      g(b, a) = v;
    }
  }
  return GramMatrix(std::move(g));
}

StateEnsemble phase_canonicalize(const StateEnsemble& ensemble, std::size_t reference) {
  if (reference >= ensemble.size()) {
    throw InvalidArgument("phase_canonicalize: reference index out of range");
  }
  const PureState& ref = ensemble.states()[reference];
  std::vector<PureState> out;
  out.reserve(ensemble.size());
  for (const PureState& s : ensemble.states()) {
    const Complex overlap = inner_product(ref, s);
    if (std::abs(overlap) > 0.0) {
      out.push_back(s.with_phase(-std::arg(overlap)));
    } else {
      out.push_back(s);
    }
  }
  return StateEnsemble(std::move(out), ensemble.priors());
}

}  // namespace qsd
