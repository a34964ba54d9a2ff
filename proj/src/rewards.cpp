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

#include "qsd/rewards.hpp"

#include <cmath>
#include <cstdlib>
#include <type_traits>

#include "qsd/states.hpp"

namespace qsd {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

RewardMatrix::RewardMatrix(MatrixXd values, BoolMatrix forbidden)
    : values_(std::move(values)), forbidden_(std::move(forbidden)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw DimensionError("RewardMatrix: empty reward table");
  }
  if (forbidden_.rows() != values_.rows() || forbidden_.cols() != values_.cols()) {
    throw DimensionError("RewardMatrix: mask shape differs from value shape");
  }
  if (!values_.allFinite()) {
    throw InvariantViolation("RewardMatrix: values must be finite; use the mask for -infinity");
  }
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      if (forbidden_(i, j)) values_(i, j) = 0.0;
    }
  }
}

RewardMatrix::RewardMatrix(MatrixXd values)
    : RewardMatrix(values, BoolMatrix::Constant(values.rows(), values.cols(), false)) {}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// 0^0 = 1.
double power(double base, int exponent) { return std::pow(base, std::abs(exponent)); }

}  // namespace

std::string scheme_name(const RewardScheme& s) {
  return std::visit(Overloaded{
                        [](const scheme::MinError&) { return std::string("min_error"); },
                        [](const scheme::MinErrorExclusion&) { return std::string("exclusion"); },
                        [](const scheme::Unambiguous& u) {
                          return std::string(u.beta ? "unambiguous_beta" : "unambiguous");
                        },
                        [](const scheme::UnambiguousExclusion&) {
                          return std::string("unambiguous_exclusion");
                        },
                        [](const scheme::Horseshoe&) { return std::string("horseshoe"); },
                        [](const scheme::CloserBetter&) { return std::string("closer_better"); },
                        [](const scheme::Exam&) { return std::string("exam"); },
                        [](const scheme::Classification&) { return std::string("classification"); },
                    },
                    s);
}

bool is_exclusion_scheme(const RewardScheme& s) {
  return std::holds_alternative<scheme::MinErrorExclusion>(s) ||
         std::holds_alternative<scheme::UnambiguousExclusion>(s);
}

RewardMatrix build_reward(const RewardScheme& s, std::size_t num_states) {
  if (num_states < 1) throw InvalidArgument("build_reward: need at least one state");
  const auto n = static_cast<Eigen::Index>(num_states);
  return std::visit(
      Overloaded{
          [n](const scheme::MinError&) { return RewardMatrix(MatrixXd::Identity(n, n)); },
          [n](const scheme::MinErrorExclusion&) {
            MatrixXd r = MatrixXd::Ones(n, n) - MatrixXd::Identity(n, n);
            return RewardMatrix(std::move(r));
          },
          [n](const scheme::Unambiguous& u) {
            MatrixXd r = MatrixXd::Zero(n + 1, n);
            BoolMatrix mask = BoolMatrix::Constant(n + 1, n, false);
            if (u.beta && !(*u.beta > 0.0 && std::isfinite(*u.beta))) {
              throw InvalidArgument("build_reward: unambiguous beta must be positive and finite");
            }
            for (Eigen::Index i = 0; i < n; ++i) {
              for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j) {
                  r(i, j) = 1.0;
                } else if (u.beta) {
                  r(i, j) = -*u.beta;
                } else {
                  mask(i, j) = true;
                }
              }
            }
            return RewardMatrix(std::move(r), std::move(mask));
          },
          [n](const scheme::UnambiguousExclusion&) {
            MatrixXd r = MatrixXd::Zero(n + 1, n);
            BoolMatrix mask = BoolMatrix::Constant(n + 1, n, false);
            for (Eigen::Index i = 0; i < n; ++i) mask(i, i) = true;
            r.row(n).setConstant(-1.0);
            return RewardMatrix(std::move(r), std::move(mask));
          },
          [n](const scheme::Horseshoe& h) {
            if (h.mu < 0) throw InvalidArgument("build_reward: horseshoe mu must be nonnegative");
            MatrixXd r(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
              for (Eigen::Index j = 0; j < n; ++j) r(i, j) = std::abs(i - j) <= h.mu ? 1.0 : 0.0;
            }
            return RewardMatrix(std::move(r));
          },
          [n](const scheme::CloserBetter& c) {
            if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) {
              throw InvalidArgument("build_reward: closer-the-better gamma must lie in [0, 1]");
            }
            MatrixXd r(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
              for (Eigen::Index j = 0; j < n; ++j) r(i, j) = power(c.gamma, static_cast<int>(i - j));
            }
            return RewardMatrix(std::move(r));
          },
          [n](const scheme::Exam& e) {
            if (!(e.partial >= 0.0 && e.partial <= 1.0)) {
              throw InvalidArgument("build_reward: exam partial credit must lie in [0, 1]");
            }
            MatrixXd r = MatrixXd::Zero(n + 1, n);
            r.topRows(n).setIdentity();
            r.row(n).setConstant(e.partial);
            return RewardMatrix(std::move(r));
          },
          [n](const scheme::Classification& c) {
            if (c.classes.empty()) throw InvalidArgument("build_reward: classification needs classes");
            MatrixXd r = MatrixXd::Zero(static_cast<Eigen::Index>(c.classes.size()), n);
            std::vector<int> seen(static_cast<std::size_t>(n), 0);
            for (std::size_t k = 0; k < c.classes.size(); ++k) {
              for (std::size_t j : c.classes[k]) {
                if (j >= static_cast<std::size_t>(n)) {
                  throw InvalidArgument("build_reward: class member out of range");
                }
                if (seen[j]++ != 0) throw InvalidArgument("build_reward: classes overlap");
                r(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = 1.0;
              }
            }
            for (int count : seen) {
              if (count == 0) throw InvalidArgument("build_reward: classes do not cover every state");
            }
            return RewardMatrix(std::move(r));
          },
      },
      s);
}

double exclusion_error(const RewardScheme& s, double optimal_reward) {
  if (std::holds_alternative<scheme::MinErrorExclusion>(s)) return 1.0 - optimal_reward;
  if (std::holds_alternative<scheme::UnambiguousExclusion>(s)) return -optimal_reward;
  throw InvalidArgument("exclusion_error: not an exclusion scheme");
}

RewardMatrix build_1cp_reward(const ChangePointReward& p) {
  const int n = p.horizon();
  if (n < 1) throw InvalidArgument("build_1cp_reward: empty profile");
  for (double r : p.profile) {
    if (!std::isfinite(r)) throw InvalidArgument("build_1cp_reward: profile entries must be finite");
  }
  if (!std::isfinite(p.inconclusive)) {
    throw InvalidArgument("build_1cp_reward: inconclusive reward must be finite");
  }
  MatrixXd r(n + 1, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r(i, j) = p.profile[static_cast<std::size_t>(std::abs(i - j))];
  }
  r.row(n).setConstant(p.inconclusive);
  return RewardMatrix(std::move(r));
}

ChangePointReward closer_better_profile(double base, int horizon, double inconclusive) {
  if (!(base >= 0.0 && base <= 1.0)) {
    throw InvalidArgument("closer_better_profile: base must lie in [0, 1]");
  }
  ChangePointReward p;
  p.profile.resize(static_cast<std::size_t>(horizon));
  for (int k = 0; k < horizon; ++k) p.profile[static_cast<std::size_t>(k)] = power(base, k);
  p.inconclusive = inconclusive;
  return p;
}

int ctb_2cp_case(const std::vector<int>& guess, const std::vector<int>& state) {
  return guess[1] < state[0] ? 2 : 3;
}

int ctb_3cp_case(const std::vector<int>& guess, const std::vector<int>& state) {
  const int j = guess[1], k = guess[2];
  const int l = state[0], m = state[1], n = state[2];
  if (l <= j && j <= k && k <= m) return 1;
  if (l <= j && j <= n && k > m) return 2;
  if (l <= m && m <= n && n < j && j <= k) return 3;
  if (j < l && l <= k && k <= m) return 4;
  if (j < l && l <= k && k > m) return 5;
  if (j <= k && k < l) return 6;
  throw InvalidArgument("ctb_3cp_case: no printed case applies");
}

namespace {

void check_base(double base, const char* who) {
  if (!(base > 0.0 && base <= 1.0)) throw InvalidArgument(std::string(who) + ": base must lie in (0, 1]");
}

}  // namespace

RewardMatrix build_2cp_ctb_reward(int horizon, double base) {
  check_base(base, "build_2cp_ctb_reward");
  const ChangeIndexSet idx = enumerate_change_indices(horizon, 2);
  const auto n = static_cast<Eigen::Index>(idx.size());
  MatrixXd r = MatrixXd::Zero(n + 1, n);
  for (Eigen::Index g = 0; g < n; ++g) {
    const auto& guess = idx[g].entries;
    for (Eigen::Index s = 0; s < n; ++s) {
      const auto& state = idx[s].entries;
      const int i = guess[0], j = guess[1], k = state[0], l = state[1];
      r(g, s) = ctb_2cp_case(guess, state) == 2 ? power(base, i - j) * power(base, k - l)
                                                : power(base, i - k) * power(base, j - l);
    }
  }
  return RewardMatrix(std::move(r));
}

RewardMatrix build_3cp_ctb_reward(int horizon, double base) {
  check_base(base, "build_3cp_ctb_reward");
  const ChangeIndexSet idx = enumerate_change_indices(horizon, 3);
  const auto size = static_cast<Eigen::Index>(idx.size());
  MatrixXd r = MatrixXd::Zero(size + 1, size);
  for (Eigen::Index g = 0; g < size; ++g) {
    const auto& guess = idx[g].entries;
    const int i = guess[0], j = guess[1], k = guess[2];
    for (Eigen::Index s = 0; s < size; ++s) {
      const auto& state = idx[s].entries;
      const int l = state[0], m = state[1], n = state[2];
      double v = 0.0;
      switch (ctb_3cp_case(guess, state)) {
        case 1: v = power(base, i - l) * power(base, j - k) * power(base, m - n); break;
        case 2: v = power(base, i - l) * power(base, j - m) * power(base, k - n); break;
        case 3: v = power(base, i - l) * power(base, m - n); break;
        case 4: v = power(base, i - j) * power(base, l - k) * power(base, m - n); break;
        case 5: v = power(base, i - j) * power(base, l - m); break;
        case 6: v = power(base, i - j) * power(base, k - l) * power(base, m - n); break;
      }
      r(g, s) = v;
    }
  }
  return RewardMatrix(std::move(r));
}

}  // namespace qsd
