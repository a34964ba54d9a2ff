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
#include <string>
#include <vector>

#include "qsd/gram.hpp"
#include "qsd/linalg.hpp"

namespace qsd {

/// Coefficient of a Hermitian basis matrix; (row, col) with row < col also
/// places conj(value) at (col, row).
struct BasisEntry {
  int row = 0;
  int col = 0;
  Complex value;
};

/// Real-linear parameterization X = sum_t x_t B_t of the dual variable.
struct DualBasis {
  std::string name;
  std::size_t dim = 0;
  std::vector<std::vector<BasisEntry>> elements;

  std::size_t num_parameters() const { return elements.size(); }
  /// sum_t x_t B_t
  MatrixXc assemble(const VectorXd& x) const;
};

/// Every Hermitian (complex) or real symmetric (real) n x n matrix.
DualBasis full_hermitian_basis(std::size_t n, bool complex);

/// Number of free real parameters of an unrestricted dual variable.
std::size_t unrestricted_parameter_count(std::size_t n, bool complex);

/// Symmetric Toeplitz matrices sum_k t_k Theta_k; with complex = true the
/// antisymmetric-imaginary diagonals i (Theta_k - Theta_{-k}) are added.
DualBasis toeplitz_basis(std::size_t n, bool complex);

/// <B_t, G> for each basis element. For the Toeplitz basis on gram_1cp this
/// is (N, 2(N-1) gamma, ..., 2 gamma^{N-1}).
VectorXd basis_inner_products(const DualBasis& basis, const MatrixXc& g);

/// Two-change-point block pattern over the lexicographic index set.
DualBasis pattern_basis_2cp(int horizon);

/// Three-change-point nested block pattern over the lexicographic index set.
DualBasis pattern_basis_3cp(int horizon);

/// Largest deviation of g from symmetric Toeplitz form.
double toeplitz_defect(const MatrixXc& g);

}  // namespace qsd
