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
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qsd/discrim.hpp"
#include "qsd/linalg.hpp"
#include "qsd/rewards.hpp"
#include "qsd/states.hpp"

namespace qsd {

struct ConfigError : Error {
  using Error::Error;
};

/// Every knob of a CLI run. The JSON config file uses the same field names.
struct ExperimentConfig {
  std::string kind = "changepoint";  // solve | changepoint | estimate | verify | sweep

  // alphabet / ensemble
  double theta = 0.7853981633974483;  // pi / 4
  std::string states_file;
  std::string gram_file;
  int num_changes = 1;
  int n_min = 2;
  int n_max = 10;
  int n_step = 1;

  // reward
  std::string scheme = "closer_better";
  double base = 0.7071067811865476;
  int mu = 0;
  double gamma = 0.5;
  std::optional<double> beta;
  double partial = 0.25;
  std::vector<std::vector<std::size_t>> classes;
  std::optional<double> epsilon_budget;
  std::string priors = "uniform";

  // what to solve
  bool heuristic = true;
  bool primal = false;
  bool oracle = false;
  double tolerance = 1e-8;
  int max_iterations = 200;

  // estimation
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> shots{1000, 10000, 100000, 1000000};  // 0 = infinite
  int trials = 1;
  std::string estimation_mode = "hadamard_full";
  bool nonnegative_promise = false;

  // sweep
  std::string sweep_parameter = "mu";
  std::vector<double> sweep_values{0, 1, 2, 3};

  // verify
  int verify_instances = 20;

  int workers = 1;
  bool long_checks = false;
  std::string out;

  /// Throws ConfigError.
  void validate() const;
  std::vector<int> horizons() const;
  SolverOptions solver_options() const;

  std::string to_json() const;
  /// Missing fields keep their defaults; unknown fields are rejected.
  static ExperimentConfig from_json(const std::string& text);
};

/// 64-bit FNV-1a of the canonical config JSON, as 16 hex digits. The output
/// path and worker count are left out.
std::string config_hash(const ExperimentConfig& cfg);

struct ResultTable {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> timing_columns;
  std::vector<std::vector<std::string>> timing_rows;
  std::vector<std::string> notes;
  /// Rows whose status column is not "optimal".
  std::size_t failed_rows = 0;
};

/// CSV with a '#' header block (schema version, kind, config hash, seed).
std::string render_csv(const ResultTable& t, const ExperimentConfig& cfg);
std::string render_timing_csv(const ResultTable& t);

/// Writes `path`, the timing sidecar and the config echo next to it.
void write_results(const ResultTable& t, const ExperimentConfig& cfg, const std::string& path);

/// Sidecar paths derived from the results path.
std::string timing_path(const std::string& path);
std::string config_echo_path(const std::string& path);

/// Change-point family of a config at horizon N.
struct ChangePointProblem {
  int horizon = 0;
  int num_changes = 1;
  GramMatrix gram;
  RewardMatrix reward;
  Heuristic heuristic = Heuristic::none;
  std::vector<std::string> notes;
};

ChangePointProblem build_changepoint_problem(const ExperimentConfig& cfg, int horizon);

/// Alphabet |psi>, |phi_1>, ..., |phi_P>: the states file when given, else
/// qubit_state(k, theta) for k = 0..P.
std::vector<PureState> changepoint_alphabet(const ExperimentConfig& cfg);

/// Reward scheme named in the config (generic schemes only).
RewardScheme scheme_from_config(const ExperimentConfig& cfg);

ResultTable run_changepoint_sweep(const ExperimentConfig& cfg);
ResultTable run_parameter_sweep(const ExperimentConfig& cfg);
ResultTable run_estimate_pipeline(const ExperimentConfig& cfg);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

VerifyReport run_verify(const ExperimentConfig& cfg);

/// Single instance from gram_file, states_file or the theta family (n_min
/// states qubit_state(k, theta)).
SolveReport run_solve(const ExperimentConfig& cfg);

// Random instances for the equivalence suites.
struct RandomInstance {
  StateEnsemble ensemble;
  RewardMatrix reward;
};

/// d in [1, max_dim], N in [2, max_states], L in [1, N + 1], complex states,
/// rewards uniform in [-1, 1], random priors.
RandomInstance random_instance(std::mt19937_64& rng, int max_dim, int max_states);

/// N real states whose pairwise overlaps are all nonnegative.
std::vector<PureState> random_nonnegative_alphabet(std::mt19937_64& rng, int count, int dim);

/// Runs f(0..count-1) on `workers` threads; f must write only its own slot.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& f);

}  // namespace qsd
