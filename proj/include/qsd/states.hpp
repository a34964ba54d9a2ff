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
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "qsd/linalg.hpp"

namespace qsd {

/// A unit-norm pure state. Normalization is checked, never repaired.
class PureState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  explicit PureState(VectorXc amplitudes);

  const VectorXc& amplitudes() const { return amplitudes_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

  /// Same state times a unit phase e^{i phi}.
  PureState with_phase(double phi) const;

 private:
  VectorXc amplitudes_;
};

/// cos(k theta)|0> + sin(k theta)|1>.
PureState qubit_state(unsigned k, double theta);

/// <a|b>; throws DimensionError on mismatched dimensions.
Complex inner_product(const PureState& a, const PureState& b);

/// A change-point tuple (c_1, ..., c_P) inside a horizon N.
///
/// Valid tuples satisfy 1 <= c_1 <= ... <= c_P <= N with c_i < c_{i+1}
/// unless c_i = N, so no mutated symbol is skipped. The all-N tuple is the
/// "no change" sequence.
struct ChangeIndex {
  std::vector<int> entries;

  std::size_t num_changes() const { return entries.size(); }
  int operator[](std::size_t i) const { return entries[i]; }
  auto operator<=>(const ChangeIndex&) const = default;
  bool operator==(const ChangeIndex&) const = default;
};

bool is_valid_change_index(const ChangeIndex& c, int horizon);

/// Alphabet symbol (0 = base state, k = k-th mutation) occupying time slot
/// t in 1..N of the sequence described by c.
int symbol_at(const ChangeIndex& c, int slot);

class ChangeIndexSet {
 public:
  ChangeIndexSet(int horizon, int num_changes, std::vector<ChangeIndex> indices);

  int horizon() const { return horizon_; }
  int num_changes() const { return num_changes_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<ChangeIndex>& indices() const { return indices_; }
  const ChangeIndex& operator[](std::size_t i) const { return indices_[i]; }

  /// Zero-based linear position of c; throws InvalidArgument when absent.
  std::size_t position_of(const ChangeIndex& c) const;
  bool contains(const ChangeIndex& c) const { return position_.count(c) != 0; }

 private:
  int horizon_;
  int num_changes_;
  std::vector<ChangeIndex> indices_;
  std::map<ChangeIndex, std::size_t> position_;
};

/// All valid change-point tuples for horizon N and P changes, in
/// lexicographic order.
ChangeIndexSet enumerate_change_indices(int horizon, int num_changes);

/// sum_{k=0}^{P} C(N-1, k), the closed-form size of the index set.
std::size_t change_index_count(int horizon, int num_changes);

/// Overlaps between the sequence alphabet (row/col 0 is the base state,
/// row/col k the k-th mutation). values(s, t) = <a_s|a_t>.
struct OverlapTable {
  MatrixXc values;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  int num_changes() const { return static_cast<int>(values.rows()) - 1; }
  /// |<psi|phi_i>|
  double gamma(int i) const { return std::abs(values(0, i)); }
  /// |<phi_i|phi_j>|
  double gamma(int i, int j) const { return std::abs(values(i, j)); }
  /// True when every entry is real and nonnegative within tol.
  bool is_nonnegative_real(double tol = 1e-14) const;

  /// Real nonnegative table built from the six (or fewer) magnitudes.
  /// gammas(i, j) for i != j; diagonal forced to 1.
  static OverlapTable from_magnitudes(const MatrixXd& gammas);
};

OverlapTable overlap_table(std::span<const PureState> alphabet);

/// Default cap on the dimension of an explicit tensor-product state.
inline constexpr std::size_t kDefaultTensorDimCap = std::size_t{1} << 24;

/// Explicit tensor-product state of a change-point sequence. Oracle use only.
PureState sequence_state(std::span<const PureState> alphabet, const ChangeIndex& c, int horizon,
                         std::size_t dim_cap = kDefaultTensorDimCap);

/// Ensemble of pure states with priors. Psi is the d x N matrix whose j-th
/// column is |psi_j>.
class StateEnsemble {
 public:
  StateEnsemble(std::vector<PureState> states, VectorXd priors);
  /// Uniform priors.
  explicit StateEnsemble(std::vector<PureState> states);

  std::size_t size() const { return states_.size(); }
  std::size_t dim() const { return states_.front().dim(); }
  const std::vector<PureState>& states() const { return states_; }
  const VectorXd& priors() const { return priors_; }
  const MatrixXc& state_matrix() const { return psi_; }

 private:
  std::vector<PureState> states_;
  VectorXd priors_;
  MatrixXc psi_;
};

}  // namespace qsd
