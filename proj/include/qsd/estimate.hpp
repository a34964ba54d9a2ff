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

#include <cstdint>
#include <string>

#include "qsd/gram.hpp"
#include "qsd/linalg.hpp"
#include "qsd/states.hpp"

namespace qsd {

/// Shots per estimated pair. `infinite` is the zero-noise sentinel: estimates
/// come back exact and nothing is sampled.
struct ShotPlan {
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t shots_per_pair = 0;
  bool infinite = false;

  static ShotPlan fixed(std::uint64_t shots);
  static ShotPlan infinite_shots();
};

/// Hoeffding, two-sided: ceil(ln(2 / delta) / (2 epsilon^2)).
ShotPlan plan_shots(double epsilon, double delta);

struct TestSample {
  std::uint64_t shots = 0;
  std::uint64_t count0 = 0;
  double estimate = 0.0;
};

/// P(0) = 1/2 + overlap_sq / 2.
double swap_test_p0(double overlap_sq);

/// Estimates |<a|b>|^2 as 2 count0 / shots - 1, clamped to [0, 1].
TestSample swap_test_sample(double overlap_sq, std::uint64_t shots, std::uint64_t seed);

enum class OverlapPart { real, imag };

/// P(0) = (1 + v) / 2 with v the requested part; the estimate is clamped to [-1, 1].
double hadamard_test_p0(Complex overlap, OverlapPart part);
TestSample hadamard_test_sample(Complex overlap, OverlapPart part, std::uint64_t shots, std::uint64_t seed);

enum class EstimationMode { swap_nonneg, hadamard_full };

std::string to_string(EstimationMode m);
EstimationMode estimation_mode_from_string(const std::string& s);

struct EstimatedGram {
  MatrixXc raw;
  GramMatrix repaired;
  MatrixXd per_entry_std;
  std::uint64_t seed = 0;
  ShotPlan plan;
  EstimationMode mode = EstimationMode::hadamard_full;
  double repair_distance = 0.0;  ///< ||repaired - raw||_F
};

/// Seed of the stream used for pair (i, j), i < j, and test part.
std::uint64_t pair_seed(std::uint64_t master, std::size_t i, std::size_t j, int part);

/// Simulates the inner-product tests on the exact overlaps of `exact`.
/// swap_nonneg needs `nonnegative_promise` and real nonnegative overlaps.
EstimatedGram estimate_gram(const GramMatrix& exact, EstimationMode mode, const ShotPlan& plan,
                            std::uint64_t seed, bool nonnegative_promise = false);
EstimatedGram estimate_gram(const StateEnsemble& ensemble, EstimationMode mode, const ShotPlan& plan,
                            std::uint64_t seed, bool nonnegative_promise = false);

/// Clip negative eigenvalues, then rescale to unit diagonal.
GramMatrix psd_project(const MatrixXc& h);

}  // namespace qsd
