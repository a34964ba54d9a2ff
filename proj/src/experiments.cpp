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

#include "qsd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qsd/estimate.hpp"
#include "qsd/gram.hpp"
#include "qsd/io.hpp"
#include "qsd/structured_dual.hpp"

namespace qsd {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
// Unrestricted duals whose Schur complement would not fit are skipped.
constexpr double kMemoryBudgetBytes = 3.5e9;

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_seconds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

bool is_change_point_scheme(const std::string& s) {
  return s == "closer_better" || s == "horseshoe" || s == "min_error";
}

// Schur complement plus its factor, in bytes.
double dual_memory_bytes(std::size_t n, bool complex) {
  const double m = complex ? double(n) * n : double(n) * (n + 1) / 2.0;
  return 16.0 * m * m;
}

}  // namespace

// ---------------------------------------------------------------------------
// config

void ExperimentConfig::validate() const {
  static const std::set<std::string> kinds{"solve", "changepoint", "estimate", "verify", "sweep"};
  if (!kinds.count(kind)) throw ConfigError("unknown kind '" + kind + "'");
  if (n_min < 1 || n_max < n_min || n_step < 1) throw ConfigError("N range must be nonempty and increasing");
  if ((kind == "changepoint" || kind == "sweep") && (num_changes < 1 || num_changes > 3)) {
    throw ConfigError("num_changes must be 1, 2 or 3");
  }
  if ((kind == "changepoint" || kind == "sweep") && !is_change_point_scheme(scheme)) {
    throw ConfigError("change-point runs support min_error, closer_better and horseshoe");
  }
  if (num_changes > 1 && scheme == "horseshoe") throw ConfigError("horseshoe is defined for one change point");
  if (!(base > 0.0 && base <= 1.0)) throw ConfigError("base must lie in (0, 1]");
  if (mu < 0) throw ConfigError("mu must be nonnegative");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (beta && !(*beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(partial >= 0.0 && partial <= 1.0)) throw ConfigError("partial must lie in [0, 1]");
  if (epsilon_budget && !(*epsilon_budget >= 0.0 && *epsilon_budget <= 1.0)) {
    throw ConfigError("epsilon_budget must lie in [0, 1]");
  }
  if (priors != "uniform" && priors != "file") throw ConfigError("priors must be 'uniform' or 'file'");
  if (!(tolerance > 0.0) || max_iterations < 1) throw ConfigError("bad solver options");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (kind == "estimate" && shots.empty()) throw ConfigError("estimate needs a shot ladder");
  if (estimation_mode != "hadamard_full" && estimation_mode != "swap_nonneg") {
    throw ConfigError("estimation_mode must be hadamard_full or swap_nonneg");
  }
  if (kind == "sweep") {
    if (sweep_parameter != "mu" && sweep_parameter != "base" && sweep_parameter != "theta") {
      throw ConfigError("sweep_parameter must be mu, base or theta");
    }
    if (sweep_values.empty()) throw ConfigError("sweep_values must be nonempty");
  }
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if ((kind == "changepoint" || kind == "sweep") && !long_checks) {
    const int cap = num_changes == 1 ? 120 : num_changes == 2 ? 14 : 9;
    if (n_max > cap) {
      throw ConfigError("N = " + std::to_string(n_max) + " with " + std::to_string(num_changes) +
                        " change point(s) is a long run; pass --long");
    }
  }
  if (verify_instances < 1) throw ConfigError("verify_instances must be at least 1");
}

std::vector<int> ExperimentConfig::horizons() const {
  std::vector<int> out;
  for (int n = n_min; n <= n_max; n += n_step) out.push_back(n);
  return out;
}

SolverOptions ExperimentConfig::solver_options() const {
  SolverOptions o;
  o.tolerance = tolerance;
  o.max_iterations = max_iterations;
  return o;
}

std::string ExperimentConfig::to_json() const {
  json j{{"kind", kind},
         {"theta", theta},
         {"states_file", states_file},
         {"gram_file", gram_file},
         {"num_changes", num_changes},
         {"n_min", n_min},
         {"n_max", n_max},
         {"n_step", n_step},
         {"scheme", scheme},
         {"base", base},
         {"mu", mu},
         {"gamma", gamma},
         {"beta", beta ? json(*beta) : json(nullptr)},
         {"partial", partial},
         {"classes", classes},
         {"epsilon_budget", epsilon_budget ? json(*epsilon_budget) : json(nullptr)},
         {"priors", priors},
         {"heuristic", heuristic},
         {"primal", primal},
         {"oracle", oracle},
         {"tolerance", tolerance},
         {"max_iterations", max_iterations},
         {"seed", seed},
         {"shots", shots},
         {"trials", trials},
         {"estimation_mode", estimation_mode},
         {"nonnegative_promise", nonnegative_promise},
         {"sweep_parameter", sweep_parameter},
         {"sweep_values", sweep_values},
         {"verify_instances", verify_instances},
         {"workers", workers},
         {"long", long_checks},
         {"out", out}};
  return j.dump(1);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  const json defaults = json::parse(c.to_json());
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ConfigError("unknown config field '" + key + "'");
  }
  auto get = [&](const char* key, auto& dst) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(dst);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
  };
  auto get_opt = [&](const char* key, std::optional<double>& dst) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    if (!j.at(key).is_number()) throw ConfigError(std::string("config field '") + key + "' must be a number");
    dst = j.at(key).get<double>();
  };
  get("kind", c.kind);
  get("theta", c.theta);
  get("states_file", c.states_file);
  get("gram_file", c.gram_file);
  get("num_changes", c.num_changes);
  get("n_min", c.n_min);
  get("n_max", c.n_max);
  get("n_step", c.n_step);
  get("scheme", c.scheme);
  get("base", c.base);
  get("mu", c.mu);
  get("gamma", c.gamma);
  get_opt("beta", c.beta);
  get("partial", c.partial);
  get("classes", c.classes);
  get_opt("epsilon_budget", c.epsilon_budget);
  get("priors", c.priors);
  get("heuristic", c.heuristic);
  get("primal", c.primal);
  get("oracle", c.oracle);
  get("tolerance", c.tolerance);
  get("max_iterations", c.max_iterations);
  get("seed", c.seed);
  get("shots", c.shots);
  get("trials", c.trials);
  get("estimation_mode", c.estimation_mode);
  get("nonnegative_promise", c.nonnegative_promise);
  get("sweep_parameter", c.sweep_parameter);
  get("sweep_values", c.sweep_values);
  get("verify_instances", c.verify_instances);
  get("workers", c.workers);
  get("long", c.long_checks);
  get("out", c.out);
  return c;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // where the results go and how many threads made them do not change them
  ExperimentConfig c = cfg;
  c.out.clear();
  c.workers = 1;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : c.to_json()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// output

namespace {

std::string join_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) s += ',';
    s += cells[k];
  }
  return s + '\n';
}

}  // namespace

std::string render_csv(const ResultTable& t, const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# qsd results schema " << kSchemaVersion << '\n';
  out << "# kind: " << t.kind << '\n';
  out << "# config_hash: " << config_hash(cfg) << '\n';
  out << "# seed: " << cfg.seed << '\n';
  for (const auto& n : t.notes) out << "# note: " << n << '\n';
  out << join_row(t.columns);
  for (const auto& r : t.rows) out << join_row(r);
  return out.str();
}

std::string render_timing_csv(const ResultTable& t) {
  std::string s = "# wall-clock seconds per solve (machine dependent)\n" + join_row(t.timing_columns);
  for (const auto& r : t.timing_rows) s += join_row(r);
  return s;
}

std::string timing_path(const std::string& path) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + ".timing.csv")).string();
}

std::string config_echo_path(const std::string& path) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + ".config.json")).string();
}

void write_results(const ResultTable& t, const ExperimentConfig& cfg, const std::string& path) {
  write_text_file(path, render_csv(t, cfg));
  if (!t.timing_columns.empty()) write_text_file(timing_path(path), render_timing_csv(t));
  write_text_file(config_echo_path(path), cfg.to_json());
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& f) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) f(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(count);
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  for (std::size_t w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          f(k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// instances

std::vector<PureState> changepoint_alphabet(const ExperimentConfig& cfg) {
  if (!cfg.states_file.empty()) {
    const StateEnsemble e = ensemble_from_json(read_text_file(cfg.states_file));
    if (e.size() != static_cast<std::size_t>(cfg.num_changes) + 1) {
      throw ConfigError("states file must hold num_changes + 1 alphabet states");
    }
    return e.states();
  }
  std::vector<PureState> a;
  for (int k = 0; k <= cfg.num_changes; ++k) a.push_back(qubit_state(static_cast<unsigned>(k), cfg.theta));
  return a;
}

RewardScheme scheme_from_config(const ExperimentConfig& cfg) {
  const std::string& s = cfg.scheme;
  if (s == "min_error") return scheme::MinError{};
  if (s == "exclusion") return scheme::MinErrorExclusion{};
  if (s == "unambiguous") return scheme::Unambiguous{cfg.beta};
  if (s == "unambiguous_exclusion") return scheme::UnambiguousExclusion{};
  if (s == "horseshoe") return scheme::Horseshoe{cfg.mu};
  if (s == "closer_better") return scheme::CloserBetter{cfg.gamma};
  if (s == "exam") return scheme::Exam{cfg.partial};
  if (s == "classification") return scheme::Classification{cfg.classes};
  throw ConfigError("unknown scheme '" + s + "'");
}

namespace {

RewardMatrix changepoint_reward(const ExperimentConfig& cfg, int horizon, std::size_t states) {
  if (cfg.num_changes == 1) {
    ChangePointReward r;
    r.profile.assign(static_cast<std::size_t>(horizon), 0.0);
    if (cfg.scheme == "closer_better") return build_1cp_reward(closer_better_profile(cfg.base, horizon));
    if (cfg.scheme == "horseshoe") {
      for (int k = 0; k < horizon; ++k) r.profile[static_cast<std::size_t>(k)] = k <= cfg.mu ? 1.0 : 0.0;
    } else {
      r.profile[0] = 1.0;
    }
    return build_1cp_reward(r);
  }
  if (cfg.scheme == "closer_better") {
    return cfg.num_changes == 2 ? build_2cp_ctb_reward(horizon, cfg.base) : build_3cp_ctb_reward(horizon, cfg.base);
  }
  const auto n = static_cast<Eigen::Index>(states);
  MatrixXd v = MatrixXd::Zero(n + 1, n);
  v.topRows(n).setIdentity();
  return RewardMatrix(v);
}

}  // namespace

ChangePointProblem build_changepoint_problem(const ExperimentConfig& cfg, int horizon) {
  const std::vector<PureState> alphabet = changepoint_alphabet(cfg);
  std::vector<std::string> notes;
  if (cfg.num_changes == 1) {
    const double gamma = std::min(1.0, std::abs(inner_product(alphabet[0], alphabet[1])));
    GramMatrix g = gram_1cp(gamma, horizon);
    RewardMatrix r = changepoint_reward(cfg, horizon, static_cast<std::size_t>(horizon));
    return {horizon, 1, std::move(g), std::move(r), Heuristic::toeplitz, std::move(notes)};
  }
  const OverlapTable table = overlap_table(alphabet);
  const ChangeIndexSet idx = enumerate_change_indices(horizon, cfg.num_changes);
  std::optional<GramMatrix> g;
  if (table.is_nonnegative_real()) {
    g = cfg.num_changes == 2 ? gram_2cp(table, horizon) : gram_3cp(table, horizon);
  } else {
    notes.push_back("signed or complex overlaps: Gram built by the slot-product path");
    g = gram_sequences_general(table, idx);
  }
  RewardMatrix r = changepoint_reward(cfg, horizon, idx.size());
  const Heuristic h = cfg.num_changes == 2 ? Heuristic::pattern_2cp : Heuristic::pattern_3cp;
  return {horizon, cfg.num_changes, std::move(*g), std::move(r), h, std::move(notes)};
}

// ---------------------------------------------------------------------------
// sweeps

namespace {

struct PointResult {
  std::vector<std::string> row;
  std::vector<std::string> timing;
  bool ok = true;
  std::vector<std::string> notes;
};

const std::vector<std::string> kChangePointColumns{
    "N", "P", "states", "scheme", "param", "beta_prime", "beta_double_prime", "gap", "alpha_prime",
    "dual_status", "heuristic_status", "primal_status", "dual_iterations", "heuristic_iterations",
    "dual_parameters", "heuristic_parameters"};

PointResult changepoint_point(const ExperimentConfig& cfg, int horizon) {
  PointResult out;
  const ChangePointProblem prob = build_changepoint_problem(cfg, horizon);
  out.notes = prob.notes;
  const std::size_t n = prob.gram.size();
  const DiscriminationInstance inst(prob.gram, prob.reward, cfg.epsilon_budget);
  const SolverOptions so = cfg.solver_options();

  std::optional<double> bp, bpp, ap;
  std::string ds = "", hs = "", ps = "";
  std::string di, hi, dpar, hpar;
  double dt = 0, ht = 0, pt = 0;

  if (dual_memory_bytes(n, !prob.gram.is_real()) > kMemoryBudgetBytes) {
    ds = "skipped_memory";
    out.ok = false;
  } else {
    const DualSolution d = solve_reduced_dual(inst, so);
    ds = to_string(d.diagnostics.status);
    di = std::to_string(d.diagnostics.iterations);
    dpar = std::to_string(d.num_parameters);
    dt = d.diagnostics.wall_seconds;
    if (d.diagnostics.optimal()) bp = d.value;
    out.ok = out.ok && d.diagnostics.optimal();
  }
  if (cfg.heuristic) {
    DualSolution h;
    if (prob.heuristic == Heuristic::toeplitz) {
      h = solve_heuristic_toeplitz(inst, so);
    } else {
      const auto pat = prob.heuristic == Heuristic::pattern_2cp ? ChangePointPattern::two : ChangePointPattern::three;
      h = solve_heuristic_structured(inst, pat, horizon, so);
    }
    hs = to_string(h.diagnostics.status);
    hi = std::to_string(h.diagnostics.iterations);
    hpar = std::to_string(h.num_parameters);
    ht = h.diagnostics.wall_seconds;
    if (h.diagnostics.optimal()) bpp = h.value;
    out.ok = out.ok && h.diagnostics.optimal();
  }
  if (cfg.primal) {
    const ReducedPrimalSolution p = solve_reduced_primal(inst, so);
    ps = to_string(p.diagnostics.status);
    pt = p.diagnostics.wall_seconds;
    if (p.diagnostics.optimal()) ap = p.value;
    out.ok = out.ok && p.diagnostics.optimal();
  }
  const std::string param = cfg.scheme == "horseshoe" ? std::to_string(cfg.mu) : fmt(cfg.base);
  std::string gap;
  if (bp && bpp) gap = fmt(*bpp - *bp);
  out.row = {std::to_string(horizon), std::to_string(prob.num_changes), std::to_string(n), cfg.scheme, param,
             opt(bp), opt(bpp), gap, opt(ap), ds, hs, ps, di, hi, dpar, hpar};
  out.timing = {std::to_string(horizon), fmt_seconds(dt), fmt_seconds(ht), fmt_seconds(pt)};
  return out;
}

void collect(ResultTable& t, std::vector<PointResult>& points, const std::vector<std::string>& prefix = {}) {
  for (auto& p : points) {
    std::vector<std::string> row = prefix;
    row.insert(row.end(), p.row.begin(), p.row.end());
    std::vector<std::string> timing = prefix;
    timing.insert(timing.end(), p.timing.begin(), p.timing.end());
    t.rows.push_back(std::move(row));
    t.timing_rows.push_back(std::move(timing));
    if (!p.ok) ++t.failed_rows;
    for (auto& n : p.notes) {
      if (std::find(t.notes.begin(), t.notes.end(), n) == t.notes.end()) t.notes.push_back(n);
    }
  }
}

}  // namespace

ResultTable run_changepoint_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultTable t;
  t.kind = "changepoint";
  t.columns = kChangePointColumns;
  t.timing_columns = {"N", "dual_seconds", "heuristic_seconds", "primal_seconds"};
  const std::vector<int> ns = cfg.horizons();
  std::vector<PointResult> points(ns.size());
  parallel_for(ns.size(), cfg.workers, [&](std::size_t k) { points[k] = changepoint_point(cfg, ns[k]); });
  collect(t, points);
  return t;
}

ResultTable run_parameter_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultTable t;
  t.kind = "sweep";
  t.columns = kChangePointColumns;
  t.columns.insert(t.columns.begin(), cfg.sweep_parameter);
  t.timing_columns = {cfg.sweep_parameter, "N", "dual_seconds", "heuristic_seconds", "primal_seconds"};
  const std::vector<int> ns = cfg.horizons();
  for (double v : cfg.sweep_values) {
    ExperimentConfig c = cfg;
    if (cfg.sweep_parameter == "mu") {
      if (v < 0 || v != std::floor(v)) throw ConfigError("mu sweep values must be nonnegative integers");
      c.mu = static_cast<int>(v);
    } else if (cfg.sweep_parameter == "base") {
      c.base = v;
    } else {
      c.theta = v;
    }
    c.validate();
    std::vector<PointResult> points(ns.size());
    parallel_for(ns.size(), cfg.workers, [&](std::size_t k) { points[k] = changepoint_point(c, ns[k]); });
    collect(t, points, {fmt(v)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// estimation

namespace {

StateEnsemble estimate_ensemble(const ExperimentConfig& cfg) {
  if (!cfg.states_file.empty()) return ensemble_from_json(read_text_file(cfg.states_file));
  std::vector<PureState> s{qubit_state(0, cfg.theta), qubit_state(1, cfg.theta)};
  return StateEnsemble(std::move(s));
}

}  // namespace

ResultTable run_estimate_pipeline(const ExperimentConfig& cfg) {
  cfg.validate();
  const StateEnsemble ens = estimate_ensemble(cfg);
  const RewardMatrix reward = build_reward(scheme_from_config(cfg), ens.size());
  const VectorXd priors = cfg.priors == "file" ? ens.priors()
                                               : VectorXd::Constant(static_cast<Eigen::Index>(ens.size()),
                                                                    1.0 / static_cast<double>(ens.size()));
  const GramMatrix exact = gram_from_ensemble(ens);
  const SolverOptions so = cfg.solver_options();
  const ReducedPrimalSolution truth =
      solve_reduced_primal(DiscriminationInstance(exact, priors, reward, cfg.epsilon_budget), so);
  if (!truth.diagnostics.optimal()) {
    throw ConfigError("reference solve on the exact Gram did not converge: " + to_string(truth.diagnostics.status));
  }
  const EstimationMode mode = estimation_mode_from_string(cfg.estimation_mode);

  ResultTable t;
  t.kind = "estimate";
  t.columns = {"shots", "trial", "seed", "alpha_true", "alpha_est", "abs_error", "repair_distance", "status"};
  t.timing_columns = {"shots", "trial", "solve_seconds"};
  for (std::size_t s = 0; s < cfg.shots.size(); ++s) {
    const std::uint64_t shots = cfg.shots[s];
    const ShotPlan plan = shots == 0 ? ShotPlan::infinite_shots() : ShotPlan::fixed(shots);
    std::vector<PointResult> points(static_cast<std::size_t>(cfg.trials));
    parallel_for(points.size(), cfg.workers, [&](std::size_t trial) {
      const std::uint64_t seed = pair_seed(cfg.seed, s, trial, 99);
      const EstimatedGram est = estimate_gram(exact, mode, plan, seed, cfg.nonnegative_promise);
      const ReducedPrimalSolution p =
          solve_reduced_primal(DiscriminationInstance(est.repaired, priors, reward, cfg.epsilon_budget), so);
      PointResult& r = points[trial];
      const bool ok = p.diagnostics.optimal();
      r.ok = ok;
      const std::string label = shots == 0 ? "inf" : std::to_string(shots);
      r.row = {label,
               std::to_string(trial),
               std::to_string(seed),
               fmt(truth.value),
               ok ? fmt(p.value) : "",
               ok ? fmt(std::abs(p.value - truth.value)) : "",
               fmt(est.repair_distance),
               to_string(p.diagnostics.status)};
      r.timing = {label, std::to_string(trial), fmt_seconds(p.diagnostics.wall_seconds)};
    });
    collect(t, points);
  }
  return t;
}

// ---------------------------------------------------------------------------
// random instances

RandomInstance random_instance(std::mt19937_64& rng, int max_dim, int max_states) {
  std::uniform_int_distribution<int> dim_d(1, max_dim), n_d(2, max_states);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(-1.0, 1.0), pos(0.05, 1.0);
  const int d = dim_d(rng), n = n_d(rng);
  std::uniform_int_distribution<int> l_d(1, n + 1);
  const int l = l_d(rng);
  std::vector<PureState> states;
  for (int k = 0; k < n; ++k) {
    VectorXc v(d);
    for (int a = 0; a < d; ++a) v(a) = Complex(normal(rng), normal(rng));
    states.emplace_back(VectorXc(v / v.norm()));
  }
  VectorXd q(n);
  for (int k = 0; k < n; ++k) q(k) = pos(rng);
  q /= q.sum();
  MatrixXd r(l, n);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < n; ++j) r(i, j) = unit(rng);
  }
  return {StateEnsemble(std::move(states), q), RewardMatrix(r)};
}

std::vector<PureState> random_nonnegative_alphabet(std::mt19937_64& rng, int count, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PureState> out;
  for (int k = 0; k < count; ++k) {
    VectorXc v(dim);
    for (int a = 0; a < dim; ++a) v(a) = u(rng) * u(rng);  // skewed, so some overlaps get small
    v(k % dim) += 0.5;
    out.emplace_back(VectorXc(v / v.norm()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// verify

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerifyReport run_verify(const ExperimentConfig& cfg) {
  cfg.validate();
  VerifyReport rep;
  const SolverOptions so = cfg.solver_options();
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      add(name, false, std::string("unexpected exception: ") + e.what());
    }
  };

  std::mt19937_64 rng(cfg.seed);
  guarded("reduction_equivalence", [&] {
    double worst = 0.0, worst_dual = 0.0;
    int solved = 0;
    for (int k = 0; k < cfg.verify_instances; ++k) {
      const RandomInstance ri = random_instance(rng, 4, 4);
      const OracleSolution o = solve_full_oracle(ri.ensemble, ri.reward, so);
      const DiscriminationInstance inst(gram_from_ensemble(ri.ensemble), ri.ensemble.priors(), ri.reward);
      const ReducedPrimalSolution p = solve_reduced_primal(inst, so);
      const DualSolution d = solve_reduced_dual(inst, so);
      if (!o.diagnostics.optimal() || !p.diagnostics.optimal() || !d.diagnostics.optimal()) continue;
      ++solved;
      worst = std::max(worst, std::abs(o.value - p.value));
      worst_dual = std::max(worst_dual, std::abs(p.value - d.value));
    }
    add("reduction_equivalence", solved == cfg.verify_instances && worst <= 1e-6,
        std::to_string(solved) + " solved, max |alpha - alpha'| = " + fmt(worst));
    add("strong_duality", solved == cfg.verify_instances && worst_dual <= 1e-6,
        "max |alpha' - beta'| = " + fmt(worst_dual));
  });

  guarded("heuristic_dominance", [&] {
    double worst = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= 3; ++p) {
      ExperimentConfig c = cfg;
      c.num_changes = p;
      c.scheme = "closer_better";
      const int horizon = p == 1 ? 8 : 4;
      const ChangePointProblem prob = build_changepoint_problem(c, horizon);
      const DiscriminationInstance inst(prob.gram, prob.reward);
      const DualSolution d = solve_reduced_dual(inst, so);
      const DualSolution h =
          p == 1 ? solve_heuristic_toeplitz(inst, so)
                 : solve_heuristic_structured(inst, p == 2 ? ChangePointPattern::two : ChangePointPattern::three,
                                              horizon, so);
      if (!d.diagnostics.optimal() || !h.diagnostics.optimal()) {
        worst = -1.0;
        break;
      }
      worst = std::min(worst, h.value - d.value);
    }
    add("heuristic_dominance", worst >= -1e-7, "min beta'' - beta' = " + fmt(worst));
  });

  guarded("gram_cross_builders", [&] {
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const auto alphabet = random_nonnegative_alphabet(rng, 4, 3);
      const OverlapTable table = overlap_table(alphabet);
      for (int n = 1; n <= 6; ++n) {
        const MatrixXc g3 = gram_sequences_general(table, enumerate_change_indices(n, 3)).entries();
        OverlapTable t2;
        t2.values = table.values.topLeftCorner(3, 3);
        worst = std::max(worst, (gram_2cp(t2, n).entries() -
                                 gram_sequences_general(t2, enumerate_change_indices(n, 2)).entries())
                                    .cwiseAbs()
                                    .maxCoeff());
        worst = std::max(worst, (gram_3cp(table, n).entries() - g3).cwiseAbs().maxCoeff());
      }
    }
    add("gram_cross_builders", worst <= 1e-12, "max entry difference " + fmt(worst));
  });

  // negative control: a corrupted Gram must be rejected by name
  {
    MatrixXc bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    bool rejected = false;
    std::string what;
    try {
      GramMatrix g(bad);
    } catch (const InvariantViolation& e) {
      rejected = true;
      what = e.what();
    }
    add("psd_negative_control", rejected, rejected ? "rejected: " + what : "corrupted Gram accepted");
  }

  {
    const StateEnsemble e(std::vector<PureState>{qubit_state(0, cfg.theta), qubit_state(1, cfg.theta)});
    const DiscriminationInstance inst(gram_from_ensemble(e), build_reward(scheme::Unambiguous{}, 2));
    bool refused = false;
    try {
      (void)solve_reduced_dual(inst, so);
    } catch (const MaskedDualError&) {
      refused = true;
    }
    add("masked_dual_refusal", refused, refused ? "typed refusal raised" : "masked dual was solved");
  }

  guarded("helstrom", [&] {
    const StateEnsemble e(std::vector<PureState>{qubit_state(0, std::numbers::pi / 4), qubit_state(1, std::numbers::pi / 4)});
    const double expected = 0.5 + 0.5 * std::sqrt(1.0 - 4.0 * 0.25 * 0.5);
    const DiscriminationInstance inst(gram_from_ensemble(e), build_reward(scheme::MinError{}, 2));
    const double a = solve_full_oracle(e, inst.reward(), so).value;
    const double p = solve_reduced_primal(inst, so).value;
    const double d = solve_reduced_dual(inst, so).value;
    const double err = std::max({std::abs(a - expected), std::abs(p - expected), std::abs(d - expected)});
    add("helstrom", err <= 1e-6, "max deviation " + fmt(err));
  });
  return rep;
}

// ---------------------------------------------------------------------------
// solve

SolveReport run_solve(const ExperimentConfig& cfg) {
  cfg.validate();
  std::optional<StateEnsemble> ens;
  std::optional<GramMatrix> g;
  if (!cfg.gram_file.empty()) {
    g = gram_from_json(read_text_file(cfg.gram_file));
  } else {
    if (!cfg.states_file.empty()) {
      ens = ensemble_from_json(read_text_file(cfg.states_file));
    } else {
      std::vector<PureState> s;
      for (int k = 0; k < cfg.n_min; ++k) s.push_back(qubit_state(static_cast<unsigned>(k), cfg.theta));
      ens = StateEnsemble(std::move(s));
    }
    g = gram_from_ensemble(*ens);
  }
  const std::size_t n = g->size();
  VectorXd priors = VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  if (cfg.priors == "file") {
    if (!ens) throw ConfigError("priors 'file' needs a states file");
    priors = ens->priors();
  }
  const DiscriminationInstance inst(*g, priors, build_reward(scheme_from_config(cfg), n), cfg.epsilon_budget);
  ReportOptions ro;
  ro.oracle = cfg.oracle && ens.has_value();
  ro.primal = true;
  ro.dual = true;
  ro.heuristic = cfg.heuristic ? Heuristic::toeplitz : Heuristic::none;
  ro.solver = cfg.solver_options();
  std::optional<StateEnsemble> oracle_ens;
  if (ro.oracle) oracle_ens = StateEnsemble(ens->states(), priors);
  SolveReport rep = solve_report(inst, oracle_ens ? &*oracle_ens : nullptr, ro);
  if (cfg.oracle && !ens) rep.notes.push_back("oracle skipped: no explicit states");
  return rep;
}

}  // namespace qsd
