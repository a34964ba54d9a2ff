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
#include <variant>
#include <vector>

#include "qsd/linalg.hpp"

namespace qsd {

/// L x N reward table. Forbidden cells stand for a reward of minus infinity
/// and become equality constraints <j|W_i|j> = 0 downstream; their stored
/// value is always 0 and never reaches an objective.
class RewardMatrix {
 public:
  RewardMatrix(MatrixXd values, Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> forbidden);
  explicit RewardMatrix(MatrixXd values);

  const MatrixXd& values() const { return values_; }
  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& forbidden() const { return forbidden_; }
  std::size_t num_guesses() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t num_states() const { return static_cast<std::size_t>(values_.cols()); }
  bool has_mask() const { return forbidden_.any(); }
  bool is_forbidden(std::size_t i, std::size_t j) const {
    return forbidden_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  MatrixXd values_;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> forbidden_;
};

namespace scheme {
struct MinError {};
/// R_ij = 0 on the diagonal and 1 elsewhere. Maximizing it minimizes the
/// exclusion error; see exclusion_error().
struct MinErrorExclusion {};
/// Exact (beta unset) forbids every wrong guess; finite beta charges -beta.
struct Unambiguous {
  std::optional<double> beta;
};
/// Rows 1..N forbid their own state; the inconclusive row costs -1.
struct UnambiguousExclusion {};
struct Horseshoe {
  int mu = 0;
};
struct CloserBetter {
  double gamma = 0.0;
};
struct Exam {
  double partial = 0.25;
};
/// classes[c] lists the (0-based) states in class c.
struct Classification {
  std::vector<std::vector<std::size_t>> classes;
};
}  // namespace scheme

using RewardScheme =
    std::variant<scheme::MinError, scheme::MinErrorExclusion, scheme::Unambiguous,
                 scheme::UnambiguousExclusion, scheme::Horseshoe, scheme::CloserBetter, scheme::Exam,
                 scheme::Classification>;

std::string scheme_name(const RewardScheme& s);
bool is_exclusion_scheme(const RewardScheme& s);

RewardMatrix build_reward(const RewardScheme& s, std::size_t num_states);

/// Converts the optimal reward of an exclusion scheme into the exclusion
/// error probability (the quantity those programs minimize).
double exclusion_error(const RewardScheme& s, double optimal_reward);

/// Rewards r_{|i-j|} by distance plus a constant inconclusive reward c.
struct ChangePointReward {
  std::vector<double> profile;
  double inconclusive = 0.0;

  int horizon() const { return static_cast<int>(profile.size()); }
};

/// (N + 1) x N matrix; row i < N is r_{|i-j|}, the last row is c.
RewardMatrix build_1cp_reward(const ChangePointReward& p);

/// Closer-the-better profile base^k, k = 0..N-1.
ChangePointReward closer_better_profile(double base, int horizon, double inconclusive = 0.0);

/// Two-change-point closer-the-better reward over guesses and states in the
/// lexicographic index set, plus a zero inconclusive row.
RewardMatrix build_2cp_ctb_reward(int horizon, double base);

/// Three-change-point counterpart; cases are evaluated top to bottom.
RewardMatrix build_3cp_ctb_reward(int horizon, double base);

/// Branch (1-based, counting the inconclusive case as 0) that set a
/// multi-change-point reward entry. guess/state are tuples from the index set.
int ctb_2cp_case(const std::vector<int>& guess, const std::vector<int>& state);
int ctb_3cp_case(const std::vector<int>& guess, const std::vector<int>& state);

}  // namespace qsd
