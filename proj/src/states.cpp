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

#include "qsd/states.hpp"

#include <cmath>
#include <sstream>

namespace qsd {

PureState::PureState(VectorXc amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 1) {
    throw InvalidArgument("PureState: dimension must be at least 1");
  }
  if (!amplitudes_.allFinite()) {
    throw InvariantViolation("PureState: non-finite amplitude");
  }
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg << "PureState: amplitudes have norm " << norm << ", expected 1";
    throw InvariantViolation(msg.str());
  }
}

PureState PureState::with_phase(double phi) const {
  VectorXc rotated = amplitudes_ * std::polar(1.0, phi);
  return PureState(std::move(rotated));
}

PureState qubit_state(unsigned k, double theta) {
  VectorXc v(2);
  const double angle = static_cast<double>(k) * theta;
  v << std::cos(angle), std::sin(angle);
  return PureState(std::move(v));
}

Complex inner_product(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("inner_product: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()) + ")");
  }
  return a.amplitudes().dot(b.amplitudes());  // Eigen's dot conjugates the left operand.
}

bool is_valid_change_index(const ChangeIndex& c, int horizon) {
  if (c.entries.empty() || horizon < 1) return false;
  if (c.entries.front() < 1) return false;
  for (std::size_t i = 0; i < c.entries.size(); ++i) {
    if (c.entries[i] > horizon) return false;
    if (i + 1 < c.entries.size()) {
      const int cur = c.entries[i];
      const int next = c.entries[i + 1];
      if (cur == horizon) {
        if (next != horizon) return false;
      } else if (next <= cur) {
        return false;
      }
    }
  }
  return true;
}

int symbol_at(const ChangeIndex& c, int slot) {
  int symbol = 0;
  for (int boundary : c.entries) {
    if (boundary < slot) ++symbol;
  }
  return symbol;
}

ChangeIndexSet::ChangeIndexSet(int horizon, int num_changes, std::vector<ChangeIndex> indices)
    : horizon_(horizon), num_changes_(num_changes), indices_(std::move(indices)) {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i].num_changes() != static_cast<std::size_t>(num_changes_) ||
        !is_valid_change_index(indices_[i], horizon_)) {
      throw InvalidArgument("ChangeIndexSet: invalid member tuple");
    }
    if (!position_.emplace(indices_[i], i).second) {
      throw InvalidArgument("ChangeIndexSet: duplicate tuple");
    }
  }
}

std::size_t ChangeIndexSet::position_of(const ChangeIndex& c) const {
  auto it = position_.find(c);
  if (it == position_.end()) {
    throw InvalidArgument("ChangeIndexSet: tuple not in set");
  }
  return it->second;
}

namespace {

void enumerate_rec(int horizon, int num_changes, std::vector<int>& prefix,
                   std::vector<ChangeIndex>& out) {
  if (static_cast<int>(prefix.size()) == num_changes) {
    out.push_back(ChangeIndex{prefix});
    return;
  }
  int lo = 1;
  if (!prefix.empty()) {
    lo = prefix.back() == horizon ? horizon : prefix.back() + 1;
  }
  for (int a = lo; a <= horizon; ++a) {
    prefix.push_back(a);
    enumerate_rec(horizon, num_changes, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

ChangeIndexSet enumerate_change_indices(int horizon, int num_changes) {
  if (horizon < 1 || num_changes < 1) {
    throw InvalidArgument("enumerate_change_indices: need N >= 1 and P >= 1");
  }
  std::vector<ChangeIndex> out;
  out.reserve(change_index_count(horizon, num_changes));
  std::vector<int> prefix;
  enumerate_rec(horizon, num_changes, prefix, out);
  return ChangeIndexSet(horizon, num_changes, std::move(out));
}

std::size_t change_index_count(int horizon, int num_changes) {
  std::size_t total = 0;
  std::size_t binom = 1;  // C(N-1, k)
  const std::size_t n = static_cast<std::size_t>(horizon - 1);
  for (std::size_t k = 0; k <= static_cast<std::size_t>(num_changes) && k <= n; ++k) {
    if (k > 0) binom = binom * (n - k + 1) / k;
    total += binom;
  }
  return total;
}

bool OverlapTable::is_nonnegative_real(double tol) const {
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const Complex v = values(i, j);
      if (std::abs(v.imag()) > tol || v.real() < -tol) return false;
    }
  }
  return true;
}

OverlapTable OverlapTable::from_magnitudes(const MatrixXd& gammas) {
  if (gammas.rows() != gammas.cols() || gammas.rows() < 2) {
    throw InvalidArgument("OverlapTable::from_magnitudes: need a square table of size >= 2");
  }
  OverlapTable t;
  t.values = MatrixXc::Identity(gammas.rows(), gammas.cols());
  for (Eigen::Index i = 0; i < gammas.rows(); ++i) {
    for (Eigen::Index j = 0; j < gammas.cols(); ++j) {
      if (i == j) continue;
      const double g = 0.5 * (gammas(i, j) + gammas(j, i));
      if (g < 0.0 || g > 1.0) {
        throw InvalidArgument("OverlapTable::from_magnitudes: magnitudes must lie in [0, 1]");
      }
      t.values(i, j) = g;
    }
  }
  return t;
}

OverlapTable overlap_table(std::span<const PureState> alphabet) {
  if (alphabet.size() < 2) {
    throw InvalidArgument("overlap_table: alphabet needs at least two symbols");
  }
  const auto n = static_cast<Eigen::Index>(alphabet.size());
  OverlapTable t;
  t.values = MatrixXc::Identity(n, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index u = s + 1; u < n; ++u) {
      const Complex v = inner_product(alphabet[s], alphabet[u]);
      t.values(s, u) = v;
      t.values(u, s) = std::conj(v);
    }
  }
  return t;
}

PureState sequence_state(std::span<const PureState> alphabet, const ChangeIndex& c, int horizon,
                         std::size_t dim_cap) {
  if (alphabet.size() != c.num_changes() + 1) {
    throw InvalidArgument("sequence_state: alphabet must have P + 1 symbols");
  }
  if (!is_valid_change_index(c, horizon)) {
    throw InvalidArgument("sequence_state: change index not valid for this horizon");
  }
  const std::size_t d = alphabet.front().dim();
  for (const auto& s : alphabet) {
    if (s.dim() != d) throw DimensionError("sequence_state: alphabet dimensions differ");
  }
  std::size_t total = 1;
  for (int t = 0; t < horizon; ++t) {
    if (total > dim_cap / d) {
      throw DimensionError("sequence_state: d^N exceeds the configured dimension cap");
    }
    total *= d;
  }
  VectorXc v = alphabet[symbol_at(c, 1)].amplitudes();
  for (int slot = 2; slot <= horizon; ++slot) {
    const VectorXc& next = alphabet[symbol_at(c, slot)].amplitudes();
    VectorXc prod(v.size() * next.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      prod.segment(i * next.size(), next.size()) = v(i) * next;
    }
    v = std::move(prod);
  }
  return PureState(std::move(v));
}

StateEnsemble::StateEnsemble(std::vector<PureState> states, VectorXd priors)
    : states_(std::move(states)), priors_(std::move(priors)) {
  if (states_.empty()) throw InvalidArgument("StateEnsemble: no states");
  const std::size_t d = states_.front().dim();
  for (const auto& s : states_) {
    if (s.dim() != d) throw DimensionError("StateEnsemble: states have different dimensions");
  }
  if (static_cast<std::size_t>(priors_.size()) != states_.size()) {
    throw DimensionError("StateEnsemble: priors length differs from number of states");
  }
  if ((priors_.array() < 0.0).any() || !priors_.allFinite()) {
    throw InvariantViolation("StateEnsemble: priors must be finite and nonnegative");
  }
  if (std::abs(priors_.sum() - 1.0) > 1e-12) {
    throw InvariantViolation("StateEnsemble: priors must sum to 1");
  }
  psi_.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(states_.size()));
  for (std::size_t j = 0; j < states_.size(); ++j) {
    psi_.col(static_cast<Eigen::Index>(j)) = states_[j].amplitudes();
  }
}

namespace {

VectorXd uniform_priors(std::size_t n) {
  if (n == 0) throw InvalidArgument("StateEnsemble: no states");
  return VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

}  // namespace

StateEnsemble::StateEnsemble(std::vector<PureState> states) : StateEnsemble(states, uniform_priors(states.size())) {}

}  // namespace qsd
