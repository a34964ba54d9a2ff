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

#include "qsd/structured_dual.hpp"

#include <array>
#include <cstdlib>
#include <map>

#include "qsd/states.hpp"

namespace qsd {

MatrixXc DualBasis::assemble(const VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != elements.size()) {
    throw DimensionError("DualBasis::assemble: parameter count mismatch");
  }
  const auto n = static_cast<Eigen::Index>(dim);
  MatrixXc out = MatrixXc::Zero(n, n);
  for (std::size_t t = 0; t < elements.size(); ++t) {
    const double xt = x(static_cast<Eigen::Index>(t));
    for (const auto& e : elements[t]) {
      out(e.row, e.col) += xt * e.value;
      if (e.row != e.col) out(e.col, e.row) += xt * std::conj(e.value);
    }
  }
  return out;
}

DualBasis full_hermitian_basis(std::size_t n, bool complex) {
  DualBasis b;
  b.name = complex ? "hermitian" : "symmetric";
  b.dim = n;
  const int size = static_cast<int>(n);
  for (int r = 0; r < size; ++r) {
    for (int c = r; c < size; ++c) b.elements.push_back({{r, c, Complex(1.0, 0.0)}});
  }
  if (complex) {
    for (int r = 0; r < size; ++r) {
      for (int c = r + 1; c < size; ++c) b.elements.push_back({{r, c, Complex(0.0, 1.0)}});
    }
  }
  return b;
}

std::size_t unrestricted_parameter_count(std::size_t n, bool complex) {
  return complex ? n * n : n * (n + 1) / 2;
}

DualBasis toeplitz_basis(std::size_t n, bool complex) {
  DualBasis b;
  b.name = complex ? "hermitian_toeplitz" : "symmetric_toeplitz";
  b.dim = n;
  const int size = static_cast<int>(n);
  for (int k = 0; k < size; ++k) {
    std::vector<BasisEntry> diag;
    for (int i = 0; i + k < size; ++i) diag.push_back({i, i + k, Complex(1.0, 0.0)});
    b.elements.push_back(std::move(diag));
  }
  if (complex) {
    for (int k = 1; k < size; ++k) {
      std::vector<BasisEntry> diag;
      for (int i = 0; i + k < size; ++i) diag.push_back({i, i + k, Complex(0.0, 1.0)});
      b.elements.push_back(std::move(diag));
    }
  }
  return b;
}

VectorXd basis_inner_products(const DualBasis& basis, const MatrixXc& g) {
  if (static_cast<std::size_t>(g.rows()) != basis.dim || g.rows() != g.cols()) {
    throw DimensionError("basis_inner_products: Gram size differs from basis dimension");
  }
  VectorXd p(static_cast<Eigen::Index>(basis.elements.size()));
  for (std::size_t t = 0; t < basis.elements.size(); ++t) {
    double acc = 0.0;
    for (const auto& e : basis.elements[t]) {
      acc += e.row == e.col ? (e.value * g(e.col, e.row)).real() : 2.0 * (e.value * g(e.col, e.row)).real();
    }
    p(static_cast<Eigen::Index>(t)) = acc;
  }
  return p;
}

double toeplitz_defect(const MatrixXc& g) {
  double worst = hermitian_defect(g);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = i; j < g.cols(); ++j) worst = std::max(worst, std::abs(g(i, j) - g(0, j - i)));
  }
  return worst;
}

namespace {

using Key = std::array<int, 5>;

// Collects positions (p <= q) under shared keys, in first-seen order.
class PatternBuilder {
 public:
  explicit PatternBuilder(std::string name, std::size_t dim) {
    basis_.name = std::move(name);
    basis_.dim = dim;
  }

  void add(const Key& key, int p, int q) {
    auto [it, fresh] = ids_.try_emplace(key, basis_.elements.size());
    if (fresh) basis_.elements.emplace_back();
    basis_.elements[it->second].push_back({p, q, Complex(1.0, 0.0)});
  }

  DualBasis take() { return std::move(basis_); }

 private:
  DualBasis basis_;
  std::map<Key, std::size_t> ids_;
};

enum Kind { kBorder = 0, kToeplitz = 1, kSymToeplitz = 2, kBlockBorder = 3, kBottomRow = 4, kNear = 5 };

}  // namespace

DualBasis pattern_basis_2cp(int horizon) {
  const ChangeIndexSet idx = enumerate_change_indices(horizon, 2);
  const int size = static_cast<int>(idx.size());
  PatternBuilder pb("pattern_2cp", idx.size());
  for (int p = 0; p < size; ++p) {
    for (int q = p; q < size; ++q) {
      const auto& u = idx[static_cast<std::size_t>(p)];
      const auto& v = idx[static_cast<std::size_t>(q)];
      if (v[0] == horizon) {
        pb.add({kBorder, p, 0, 0, 0}, p, q);
        continue;
      }
      const int k = v[0] - u[0] + 1;
      const int r = u[1] - u[0] - 1;
      const int c = v[1] - v[0] - 1;
      if (k == 1) {
        pb.add({kSymToeplitz, 1, 0, std::abs(c - r), 0}, p, q);
      } else {
        pb.add({kToeplitz, k, 0, c - r, 0}, p, q);
      }
    }
  }
  return pb.take();
}

DualBasis pattern_basis_3cp(int horizon) {
  const ChangeIndexSet idx = enumerate_change_indices(horizon, 3);
  const int size = static_cast<int>(idx.size());
  PatternBuilder pb("pattern_3cp", idx.size());
  for (int p = 0; p < size; ++p) {
    for (int q = p; q < size; ++q) {
      const auto& u = idx[static_cast<std::size_t>(p)];
      const auto& v = idx[static_cast<std::size_t>(q)];
      if (v[0] == horizon) {
        pb.add({kBorder, p, 0, 0, 0}, p, q);
        continue;
      }
      const int k = v[0] - u[0] + 1;
      if (v[1] == horizon) {
        pb.add({kBlockBorder, k, u[1], u[2], 0}, p, q);
        continue;
      }
      if (u[1] == horizon) {
        pb.add({kBottomRow, k, v[1], v[2], 0}, p, q);
        continue;
      }
      const int delta = v[1] - u[1];
      const int r = u[2] - u[1] - 1;
      const int c = v[2] - v[1] - 1;
      const int offset = delta >= 0 ? c - r : r - c;
      const int ad = std::abs(delta);
      if (k == 1 && delta == 0) {
        pb.add({kSymToeplitz, 1, 0, std::abs(c - r), 0}, p, q);
      } else if (ad >= k - 1) {
        pb.add({kToeplitz, k, ad, offset, 0}, p, q);
      } else {
        pb.add({kNear, k, ad, offset, 0}, p, q);
      }
    }
  }
  return pb.take();
}

}  // namespace qsd
