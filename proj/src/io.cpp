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

#include "qsd/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qsd {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad field '") + key + "': " + e.what());
  }
}

json complex_matrix(const MatrixXc& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back({m(r, c).real(), m(r, c).imag()});
  }
  return out;
}

json real_matrix(const MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

MatrixXc read_complex(const json& arr, Eigen::Index rows, Eigen::Index cols) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(rows * cols)) {
    throw InvalidArgument("complex matrix: expected " + std::to_string(rows * cols) + " [re, im] pairs");
  }
  MatrixXc m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c, ++k) {
      const json& e = arr[k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw InvalidArgument("complex matrix: entries must be [re, im] pairs");
      }
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

json diagnostics(const SolverDiagnostics& d) {
  json warn = json::array();
  for (const auto& w : d.warnings) warn.push_back(w);
  return {{"status", to_string(d.status)},
          {"iterations", d.iterations},
          {"primal_residual", d.primal_residual},
          {"dual_residual", d.dual_residual},
          {"gap", d.gap},
          {"complementarity", d.complementarity},
          {"min_eig_X", d.min_eig_X},
          {"min_eig_Z", d.min_eig_Z},
          {"weak_duality_violation", d.weak_duality_violation},
          {"wall_seconds", d.wall_seconds},
          {"constraints", d.num_constraints},
          {"warnings", warn}};
}

}  // namespace

std::string to_json(const GramMatrix& g) {
  return json{{"size", g.size()}, {"entries", complex_matrix(g.entries())}}.dump(1);
}

GramMatrix gram_from_json(const std::string& text) {
  const json j = parse(text);
  const auto n = field<long>(j, "size");
  if (n < 1) throw InvalidArgument("gram: size must be positive");
  return GramMatrix(read_complex(j.at("entries"), n, n));
}

std::string to_json(const RewardMatrix& r) {
  json mask = json::array();
  for (Eigen::Index i = 0; i < r.forbidden().rows(); ++i) {
    for (Eigen::Index k = 0; k < r.forbidden().cols(); ++k) mask.push_back(r.forbidden()(i, k) ? 1 : 0);
  }
  return json{{"guesses", r.num_guesses()},
              {"states", r.num_states()},
              {"values", real_matrix(r.values())},
              {"mask", mask}}
      .dump(1);
}

RewardMatrix reward_from_json(const std::string& text) {
  const json j = parse(text);
  const auto l = field<long>(j, "guesses");
  const auto n = field<long>(j, "states");
  if (l < 1 || n < 1) throw InvalidArgument("reward: dimensions must be positive");
  const auto values = field<std::vector<double>>(j, "values");
  if (values.size() != static_cast<std::size_t>(l * n)) throw InvalidArgument("reward: wrong value count");
  MatrixXd v(l, n);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(l, n, false);
  for (long i = 0; i < l; ++i) {
    for (long k = 0; k < n; ++k) v(i, k) = values[static_cast<std::size_t>(i * n + k)];
  }
  if (j.contains("mask")) {
    const auto bits = field<std::vector<int>>(j, "mask");
    if (bits.size() != values.size()) throw InvalidArgument("reward: wrong mask length");
    for (long i = 0; i < l; ++i) {
      for (long k = 0; k < n; ++k) mask(i, k) = bits[static_cast<std::size_t>(i * n + k)] != 0;
    }
  }
  return RewardMatrix(v, mask);
}

std::string to_json(const StateEnsemble& e) {
  json states = json::array();
  for (const auto& s : e.states()) states.push_back(complex_matrix(s.amplitudes()));
  std::vector<double> priors(e.priors().data(), e.priors().data() + e.priors().size());
  return json{{"dim", e.dim()}, {"states", states}, {"priors", priors}}.dump(1);
}

StateEnsemble ensemble_from_json(const std::string& text) {
  const json j = parse(text);
  const auto d = field<long>(j, "dim");
  if (d < 1) throw InvalidArgument("ensemble: dim must be positive");
  const json& arr = j.at("states");
  if (!arr.is_array() || arr.empty()) throw InvalidArgument("ensemble: 'states' must be a nonempty list");
  std::vector<PureState> states;
  for (const auto& s : arr) states.emplace_back(VectorXc(read_complex(s, d, 1)));
  if (!j.contains("priors")) return StateEnsemble(std::move(states));
  const auto p = field<std::vector<double>>(j, "priors");
  return StateEnsemble(std::move(states), Eigen::Map<const VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
}

std::string to_json(const EstimatedGram& e) {
  return json{{"mode", to_string(e.mode)},
              {"seed", e.seed},
              {"plan",
               {{"epsilon", e.plan.epsilon},
                {"delta", e.plan.delta},
                {"shots_per_pair", e.plan.shots_per_pair},
                {"infinite", e.plan.infinite}}},
              {"size", e.raw.rows()},
              {"raw", complex_matrix(e.raw)},
              {"repaired", complex_matrix(e.repaired.entries())},
              {"per_entry_std", real_matrix(e.per_entry_std)},
              {"repair_distance", e.repair_distance}}
      .dump(1);
}

std::string to_json(const SolveReport& r) {
  json j;
  auto value = [&](const char* key, const std::optional<double>& v) { j[key] = v ? json(*v) : json(nullptr); };
  value("alpha", r.alpha);
  value("alpha_prime", r.alpha_prime);
  value("beta_prime", r.beta_prime);
  value("beta_double_prime", r.beta_double_prime);
  auto diag = [&](const char* key, const std::optional<SolverDiagnostics>& d) {
    j["solves"][key] = d ? diagnostics(*d) : json(nullptr);
  };
  diag("oracle", r.oracle);
  diag("primal", r.primal);
  diag("dual", r.dual);
  diag("heuristic", r.heuristic);
  j["dual_parameters"] = r.dual_parameters;
  j["heuristic_parameters"] = r.heuristic_parameters;
  j["consistent"] = r.consistent();
  j["notes"] = r.notes;
  return j.dump(1);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

}  // namespace qsd
