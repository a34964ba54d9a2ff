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

#include "qsd/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace qsd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

TestSample bernoulli_estimate(double p0, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw InvalidArgument("shots must be at least 1");
  TestSample s;
  s.shots = shots;
  if (p0 >= 1.0) {
    s.count0 = shots;
  } else if (p0 <= 0.0) {
    s.count0 = 0;
  } else {
    std::mt19937_64 rng(seed);
    std::binomial_distribution<std::uint64_t> draw(shots, p0);
    s.count0 = draw(rng);
  }
  s.estimate = 2.0 * static_cast<double>(s.count0) / static_cast<double>(shots) - 1.0;
  return s;
}

// Standard error of 2 p_hat - 1.
double binomial_std(const TestSample& s) {
  const double p = static_cast<double>(s.count0) / static_cast<double>(s.shots);
  return 2.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(s.shots));
}

}  // namespace

ShotPlan ShotPlan::fixed(std::uint64_t shots) {
  if (shots == 0) throw InvalidArgument("ShotPlan: shots must be at least 1");
  ShotPlan p;
  p.shots_per_pair = shots;
  return p;
}

ShotPlan ShotPlan::infinite_shots() {
  ShotPlan p;
  p.infinite = true;
  return p;
}

ShotPlan plan_shots(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("plan_shots: epsilon and delta must lie in (0, 1)");
  }
  ShotPlan p;
  p.epsilon = epsilon;
  p.delta = delta;
  const double raw = std::log(2.0 / delta) / (2.0 * epsilon * epsilon);
  // guard against 184.99999999 style round-off before the ceiling
  p.shots_per_pair = static_cast<std::uint64_t>(std::ceil(raw - 1e-9 * raw));
  return p;
}

double swap_test_p0(double overlap_sq) {
  if (!(overlap_sq >= 0.0 && overlap_sq <= 1.0)) throw InvalidArgument("swap test: overlap_sq outside [0, 1]");
  return 0.5 + 0.5 * overlap_sq;
}

TestSample swap_test_sample(double overlap_sq, std::uint64_t shots, std::uint64_t seed) {
  TestSample s = bernoulli_estimate(swap_test_p0(overlap_sq), shots, seed);
  s.estimate = std::clamp(s.estimate, 0.0, 1.0);
  return s;
}

double hadamard_test_p0(Complex overlap, OverlapPart part) {
  if (std::abs(overlap) > 1.0 + 1e-12) throw InvalidArgument("hadamard test: |overlap| > 1");
  const double v = part == OverlapPart::real ? overlap.real() : overlap.imag();
  return std::clamp(0.5 * (1.0 + v), 0.0, 1.0);
}

TestSample hadamard_test_sample(Complex overlap, OverlapPart part, std::uint64_t shots, std::uint64_t seed) {
  TestSample s = bernoulli_estimate(hadamard_test_p0(overlap, part), shots, seed);
  s.estimate = std::clamp(s.estimate, -1.0, 1.0);
  return s;
}

std::string to_string(EstimationMode m) {
  return m == EstimationMode::swap_nonneg ? "swap_nonneg" : "hadamard_full";
}

EstimationMode estimation_mode_from_string(const std::string& s) {
  if (s == "swap_nonneg" || s == "swap") return EstimationMode::swap_nonneg;
  if (s == "hadamard_full" || s == "hadamard") return EstimationMode::hadamard_full;
  throw InvalidArgument("unknown estimation mode '" + s + "'");
}

std::uint64_t pair_seed(std::uint64_t master, std::size_t i, std::size_t j, int part) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(i));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(j) << 1));
  return splitmix64(h ^ static_cast<std::uint64_t>(part));
}

GramMatrix psd_project(const MatrixXc& h) {
  if (h.rows() != h.cols()) throw DimensionError("psd_project: matrix not square");
  if (hermitian_defect(h) > 1e-9) throw InvariantViolation("psd_project: input not Hermitian");
  const MatrixXc sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(sym);
  const VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  MatrixXc out = es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  VectorXd scale(out.rows());
  for (Eigen::Index k = 0; k < out.rows(); ++k) {
    const double d = out(k, k).real();
    if (!(d > 1e-300)) throw InvariantViolation("psd_project: zero diagonal entry after clipping");
    scale(k) = 1.0 / std::sqrt(d);
  }
  out = scale.cast<Complex>().asDiagonal() * out * scale.cast<Complex>().asDiagonal();
  for (Eigen::Index k = 0; k < out.rows(); ++k) out(k, k) = 1.0;
  return GramMatrix(out);
}

EstimatedGram estimate_gram(const GramMatrix& exact, EstimationMode mode, const ShotPlan& plan,
                            std::uint64_t seed, bool nonnegative_promise) {
  const MatrixXc& g = exact.entries();
  const Eigen::Index n = g.rows();
  if (mode == EstimationMode::swap_nonneg) {
    if (!nonnegative_promise) throw InvalidArgument("swap mode needs the nonnegative-overlap promise");
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(g(i, j).imag()) > 1e-12 || g(i, j).real() < -1e-12) {
          throw InvalidArgument("swap mode: overlaps violate the nonnegativity promise");
        }
      }
    }
  }
  EstimatedGram out{.raw = g, .repaired = exact, .per_entry_std = MatrixXd::Zero(n, n), .seed = seed,
                    .plan = plan, .mode = mode, .repair_distance = 0.0};
  if (plan.infinite) return out;
  if (plan.shots_per_pair == 0) throw InvalidArgument("estimate_gram: empty shot plan");

  MatrixXc raw = MatrixXc::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      Complex v;
      double sd = 0.0;
      if (mode == EstimationMode::swap_nonneg) {
        const double sq = std::min(1.0, std::norm(g(i, j)));
        const TestSample s = swap_test_sample(sq, plan.shots_per_pair, pair_seed(seed, ui, uj, 0));
        const double mag = std::sqrt(s.estimate);
        v = mag;
        const double sd_sq = binomial_std(s);
        // delta method on sqrt, floored so that a zero estimate keeps a finite spread
        sd = sd_sq / (2.0 * std::sqrt(std::max(s.estimate, sd_sq)));
      } else {
        const TestSample re = hadamard_test_sample(g(i, j), OverlapPart::real, plan.shots_per_pair,
                                                   pair_seed(seed, ui, uj, 1));
        const TestSample im = hadamard_test_sample(g(i, j), OverlapPart::imag, plan.shots_per_pair,
                                                   pair_seed(seed, ui, uj, 2));
        v = Complex(re.estimate, im.estimate);
        sd = std::hypot(binomial_std(re), binomial_std(im));
      }
      raw(i, j) = v;
      raw(j, i) = std::conj(v);
      out.per_entry_std(i, j) = out.per_entry_std(j, i) = sd;
    }
  }
  out.raw = raw;
  out.repaired = psd_project(raw);
  out.repair_distance = (out.repaired.entries() - raw).norm();
  return out;
}

EstimatedGram estimate_gram(const StateEnsemble& ensemble, EstimationMode mode, const ShotPlan& plan,
                            std::uint64_t seed, bool nonnegative_promise) {
  return estimate_gram(gram_from_ensemble(ensemble), mode, plan, seed, nonnegative_promise);
}

}  // namespace qsd
