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

#include "qsd/linalg.hpp"
#include "qsd/states.hpp"

namespace qsd {

/// Hermitian PSD matrix with unit diagonal. Construction validates all three
/// properties; nothing is repaired here.
class GramMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;
  static constexpr double kDiagonalTolerance = 1e-12;
  static constexpr double kPsdTolerance = 1e-9;

  explicit GramMatrix(MatrixXc entries);

  const MatrixXc& entries() const { return entries_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  Complex operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  bool is_real() const { return is_effectively_real(entries_); }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  MatrixXc entries_;
  double min_eigenvalue_ = 0.0;
};

GramMatrix gram_from_ensemble(const StateEnsemble& ensemble);

/// Slot-product Gram of all sequences in idx over the alphabet described by
/// table. Works for complex overlaps and any number of change points.
GramMatrix gram_sequences_general(const OverlapTable& table, const ChangeIndexSet& idx);

/// Symmetric Toeplitz Gram gamma^{|i-j|} of the single-change-point family.
GramMatrix gram_1cp(double gamma, int horizon);

/// Closed form for at most two change points. Requires a real nonnegative
/// overlap table (use gram_sequences_general otherwise).
GramMatrix gram_2cp(const OverlapTable& table, int horizon);

/// Closed form for at most three change points. Requires a real nonnegative
/// overlap table.
GramMatrix gram_3cp(const OverlapTable& table, int horizon);

/// Which of the six three-change-point branches produced entry (a, b).
/// The pair is ordered so that a's leading entry does not exceed b's.
int gram_3cp_case(const ChangeIndex& a, const ChangeIndex& b);

/// Multiplies each state by a unit phase so that its overlap with
/// states[reference] becomes real and nonnegative. The discrimination value
/// is unchanged; for single-change-point sequences the resulting Gram is
/// the real symmetric Toeplitz matrix |G_ij|.
StateEnsemble phase_canonicalize(const StateEnsemble& ensemble, std::size_t reference = 0);

}  // namespace qsd
