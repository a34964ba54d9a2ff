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

// qsd: command-line front end for the discrimination library.
//
// Exit codes: 0 success, 1 suite failure, 2 bad config, 3 solver did not
// converge (solve only).

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsd/experiments.hpp"
#include "qsd/io.hpp"

namespace {

constexpr int kExitSuiteFailure = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitNoConvergence = 3;

struct Overrides {
  std::string config;
  std::optional<double> theta, base, epsilon_budget, tolerance;
  std::optional<int> num_changes, n_min, n_max, n_step, mu, trials, workers, max_iterations;
  std::optional<std::string> scheme, states, gram, mode, sweep_parameter, out;
  std::vector<std::string> shots;
  std::vector<double> sweep_values;
  std::optional<std::uint64_t> seed;
  std::optional<bool> heuristic;
  bool primal = false, oracle = false, long_checks = false, promise = false;
};

void add_options(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config file (flags override it)");
  app->add_option("--theta", o.theta, "alphabet angle in radians");
  app->add_option("--num-changes", o.num_changes, "number of change points (1-3)");
  app->add_option("--n-min", o.n_min, "smallest horizon / ensemble size");
  app->add_option("--n-max", o.n_max, "largest horizon");
  app->add_option("--n-step", o.n_step, "horizon step");
  app->add_option("--scheme", o.scheme, "reward scheme");
  app->add_option("--base", o.base, "closer-the-better base for change-point rewards");
  app->add_option("--mu", o.mu, "horseshoe closeness");
  app->add_option("--epsilon-budget", o.epsilon_budget, "error budget P_E <= eps");
  app->add_flag("--heuristic,!--no-heuristic", o.heuristic, "solve the structured heuristic too");
  app->add_flag("--primal", o.primal, "also solve the reduced primal");
  app->add_flag("--oracle", o.oracle, "also solve the full-dimension program (solve only)");
  app->add_option("--shots", o.shots, "shot ladder; 'inf' is the noiseless sentinel");
  app->add_option("--trials", o.trials, "trials per shot count");
  app->add_option("--mode", o.mode, "estimation mode: hadamard_full or swap_nonneg");
  app->add_flag("--nonnegative-promise", o.promise, "overlaps are promised nonnegative (swap mode)");
  app->add_option("--sweep-parameter", o.sweep_parameter, "mu, base or theta");
  app->add_option("--sweep-values", o.sweep_values, "values of the swept parameter");
  app->add_option("--states", o.states, "ensemble / alphabet JSON file");
  app->add_option("--gram", o.gram, "Gram matrix JSON file (solve)");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--tolerance", o.tolerance, "solver tolerance");
  app->add_option("--max-iterations", o.max_iterations, "solver iteration cap");
  app->add_option("--workers", o.workers, "worker threads for sweep points");
  app->add_flag("--long", o.long_checks, "lift the desk-scale caps for large runs");
  app->add_option("--out", o.out, "output path (stdout when omitted)");
}

qsd::ExperimentConfig make_config(const std::string& kind, const Overrides& o) {
  qsd::ExperimentConfig c;
  if (!o.config.empty()) c = qsd::ExperimentConfig::from_json(qsd::read_text_file(o.config));
  c.kind = kind;
  if (o.theta) c.theta = *o.theta;
  if (o.base) c.base = *o.base;
  if (o.epsilon_budget) c.epsilon_budget = *o.epsilon_budget;
  if (o.tolerance) c.tolerance = *o.tolerance;
  if (o.num_changes) c.num_changes = *o.num_changes;
  if (o.n_min) c.n_min = *o.n_min;
  if (o.n_max) c.n_max = *o.n_max;
  if (o.n_min && !o.n_max && c.n_max < c.n_min) c.n_max = c.n_min;
  if (o.n_step) c.n_step = *o.n_step;
  if (o.mu) c.mu = *o.mu;
  if (o.trials) c.trials = *o.trials;
  if (o.workers) c.workers = *o.workers;
  if (o.max_iterations) c.max_iterations = *o.max_iterations;
  if (o.scheme) c.scheme = *o.scheme;
  if (o.states) c.states_file = *o.states;
  if (o.gram) c.gram_file = *o.gram;
  if (o.mode) c.estimation_mode = *o.mode;
  if (o.sweep_parameter) c.sweep_parameter = *o.sweep_parameter;
  if (o.out) c.out = *o.out;
  if (!o.sweep_values.empty()) c.sweep_values = o.sweep_values;
  if (!o.shots.empty()) {
    c.shots.clear();
    for (const auto& s : o.shots) {
      if (s == "inf") {
        c.shots.push_back(0);
        continue;
      }
      try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size() || v == 0) throw std::invalid_argument(s);
        c.shots.push_back(v);
      } catch (const std::exception&) {
        throw qsd::ConfigError("bad shot count '" + s + "'");
      }
    }
  }
  if (o.seed) c.seed = *o.seed;
  if (o.heuristic) c.heuristic = *o.heuristic;
  if (o.primal) c.primal = true;
  if (o.oracle) c.oracle = true;
  if (o.long_checks) c.long_checks = true;
  if (o.promise) c.nonnegative_promise = true;
  c.validate();
  return c;
}

void emit_table(const qsd::ResultTable& t, const qsd::ExperimentConfig& c) {
  if (c.out.empty()) {
    std::cout << qsd::render_csv(t, c);
  } else {
    qsd::write_results(t, c, c.out);
    std::cerr << "wrote " << c.out << " (" << t.rows.size() << " rows)\n";
  }
}

int run(const std::string& kind, const Overrides& o) {
  const qsd::ExperimentConfig c = make_config(kind, o);
  if (kind == "solve") {
    const qsd::SolveReport r = qsd::run_solve(c);
    const std::string text = qsd::to_json(r);
    if (c.out.empty()) {
      std::cout << text << '\n';
    } else {
      qsd::write_text_file(c.out, text);
      qsd::write_text_file(qsd::config_echo_path(c.out), c.to_json());
    }
    for (const auto* d : {&r.oracle, &r.primal, &r.dual, &r.heuristic}) {
      if (*d && !(*d)->optimal()) return kExitNoConvergence;
    }
    return r.consistent() ? 0 : kExitSuiteFailure;
  }
  if (kind == "verify") {
    const qsd::VerifyReport r = qsd::run_verify(c);
    for (const auto& check : r.checks) {
      std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
    }
    return r.passed() ? 0 : kExitSuiteFailure;
  }
  qsd::ResultTable t;
  if (kind == "changepoint") t = qsd::run_changepoint_sweep(c);
  if (kind == "sweep") t = qsd::run_parameter_sweep(c);
  if (kind == "estimate") t = qsd::run_estimate_pipeline(c);
  emit_table(t, c);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized pure-state discrimination through Gram-reduced semidefinite programs"};
  app.require_subcommand(1);
  Overrides o;
  std::string chosen;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "solve one instance and print a JSON report"},
      {"changepoint", "change-point sweep over N (CSV)"},
      {"estimate", "simulated Gram estimation pipeline over a shot ladder (CSV)"},
      {"verify", "randomized equivalence and contract checks"},
      {"sweep", "change-point sweep over a reward or alphabet parameter (CSV)"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_options(sub, o);
    sub->callback([&chosen, n = name] { chosen = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitBadConfig;
  }
  try {
    return run(chosen, o);
  } catch (const qsd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const qsd::InvalidArgument& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const qsd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSuiteFailure;
  }
}
