// Copyright 2026 The qjt Authors
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

#include "qjt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qjt/errors.hpp"

namespace qjt {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (allowed.find(key) == allowed.end())
      throw ConfigError(where + ": unknown key \"" + key + "\"");
}

double get_number(const json& j, const std::string& key, double fallback,
                  const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return j[key].get<double>();
}

long get_integer(const json& j, const std::string& key, long fallback,
                 const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer())
    throw ConfigError(where + "." + key + ": expected an integer");
  return j[key].get<long>();
}

std::vector<double> get_grid(const json& j, const std::string& key,
                             std::vector<double> fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_array()) throw ConfigError(where + "." + key + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected numbers");
    out.push_back(v.get<double>());
  }
  if (out.empty()) throw ConfigError(where + "." + key + ": empty grid");
  return out;
}

Matrix parse_matrix(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ConfigError(where + ": expected " + std::to_string(dim) + " rows");
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw ConfigError(where + ": expected " + std::to_string(dim) + " columns");
    for (int c = 0; c < dim; ++c) {
      const auto& e = row[c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError(where + ": entries must be [re, im] pairs");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

Model parse_explicit_model(const json& jm) {
  check_keys(jm, {"type", "dim", "protocol", "channels", "beta", "reversal_basis",
                  "time_scale"},
             "model");
  for (const char* key : {"dim", "protocol", "channels", "beta"})
    if (!jm.contains(key)) throw ConfigError(std::string("model.") + key + ": required");
  int dim = static_cast<int>(get_integer(jm, "dim", 0, "model"));
  if (dim < 1) throw ConfigError("model.dim: must be >= 1");

  Model m;
  m.dim = dim;
  if (!jm["protocol"].is_array() || jm["protocol"].empty())
    throw ConfigError("model.protocol: expected a nonempty array of segments");
  for (const auto& seg : jm["protocol"]) {
    check_keys(seg, {"duration", "hamiltonian"}, "model.protocol[]");
    if (!seg.contains("duration") || !seg.contains("hamiltonian"))
      throw ConfigError("model.protocol[]: duration and hamiltonian required");
    m.protocol.segments.push_back(
        {seg["duration"].get<double>(),
         parse_matrix(seg["hamiltonian"], dim, "model.protocol[].hamiltonian")});
  }
  if (!jm["channels"].is_array())
    throw ConfigError("model.channels: expected an array");
  for (const auto& ch : jm["channels"]) {
    check_keys(ch, {"op", "entropy_flux", "efficiency", "reservoir", "reverse_index"},
               "model.channels[]");
    for (const char* key : {"op", "entropy_flux", "efficiency", "reservoir", "reverse_index"})
      if (!ch.contains(key))
        throw ConfigError(std::string("model.channels[].") + key + ": required");
    Channel c;
    c.op = parse_matrix(ch["op"], dim, "model.channels[].op");
    c.entropy_flux = ch["entropy_flux"].get<double>();
    c.efficiency = ch["efficiency"].get<double>();
    c.reservoir = static_cast<int>(ch["reservoir"].get<long>());
    c.reverse_index = static_cast<int>(ch["reverse_index"].get<long>());
    if (c.efficiency < 0 || c.efficiency > 1)
      throw ConfigError("model.channels[].efficiency: must lie in [0, 1]");
    m.channels.push_back(std::move(c));
  }
  if (!jm["beta"].is_object()) throw ConfigError("model.beta: expected an object");
  for (const auto& [key, value] : jm["beta"].items()) {
    if (!value.is_number()) throw ConfigError("model.beta: values must be numbers");
    int reservoir = 0;
    try {
      reservoir = std::stoi(key);
    } catch (const std::exception&) {
      throw ConfigError("model.beta: keys must be integer reservoir labels");
    }
    m.beta[reservoir] = value.get<double>();
  }
  if (jm.contains("reversal_basis"))
    m.reversal_basis = parse_matrix(jm["reversal_basis"], dim, "model.reversal_basis");

  auto violations = validate_model(m);
  if (!violations.empty()) {
    std::string msg = "model: invalid";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ConfigError(msg);
  }
  return m;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  check_keys(j,
             {"model", "tau", "seed", "samples", "hidden_samples", "grid_bins", "eta_grid",
              "tau_grid", "xi_grid", "q_grid", "points_per_interval", "conditional_mode",
              "max_attempts", "records"},
             "config");

  RunConfig cfg;
  json jm = j.contains("model") ? j["model"] : json::object();
  if (!jm.is_object()) throw ConfigError("model: expected an object");
  std::string type = "two_level";
  if (jm.contains("type")) {
    if (!jm["type"].is_string()) throw ConfigError("model.type: expected a string");
    type = jm["type"].get<std::string>();
  }

  if (type == "two_level") {
    check_keys(jm, {"type", "omega", "gamma0", "epsilon", "beta", "eta_minus", "eta_plus"},
               "model");
    cfg.two_level = true;
    TwoLevelParams p;
    p.omega = get_number(jm, "omega", 1.0, "model");
    if (!(p.omega > 0)) throw ConfigError("model.omega: must be positive");
    // gamma0 and epsilon are given in units of omega; beta as beta*omega.
    p.gamma0 = get_number(jm, "gamma0", 1e-3, "model") * p.omega;
    p.epsilon = get_number(jm, "epsilon", 1e-2, "model") * p.omega;
    p.beta = get_number(jm, "beta", 0.2, "model") / p.omega;
    p.eta_minus = get_number(jm, "eta_minus", 0.2, "model");
    p.eta_plus = get_number(jm, "eta_plus", 0.2, "model");
    if (!(p.gamma0 > 0)) throw ConfigError("model.gamma0: must be positive");
    if (p.eta_minus < 0 || p.eta_minus > 1)
      throw ConfigError("model.eta_minus: must lie in [0, 1]");
    if (p.eta_plus < 0 || p.eta_plus > 1)
      throw ConfigError("model.eta_plus: must lie in [0, 1]");
    double tau_file = get_number(j, "tau", 1.0, "config");
    if (!(tau_file > 0)) throw ConfigError("tau: must be positive");
    p.tau = tau_file / p.gamma0;
    cfg.params = p;
    cfg.model = build_two_level_model(p);
    cfg.time_scale = p.gamma0;
    cfg.tau = p.tau;
  } else if (type == "explicit") {
    cfg.two_level = false;
    cfg.model = parse_explicit_model(jm);
    cfg.time_scale = get_number(jm, "time_scale", 1.0, "model");
    if (!(cfg.time_scale > 0)) throw ConfigError("model.time_scale: must be positive");
    double tau_file = get_number(j, "tau", cfg.model.protocol.duration() * cfg.time_scale,
                                 "config");
    cfg.tau = tau_file / cfg.time_scale;
    if (std::abs(cfg.tau - cfg.model.protocol.duration()) >
        1e-9 * std::max(1.0, cfg.model.protocol.duration()))
      throw ConfigError("tau: must equal the protocol duration for explicit models");
  } else {
    throw ConfigError("model.type: must be \"two_level\" or \"explicit\"");
  }

  long seed = get_integer(j, "seed", 20260814, "config");
  if (seed < 0) throw ConfigError("seed: must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.samples = static_cast<int>(get_integer(j, "samples", 10000, "config"));
  cfg.hidden_samples = static_cast<int>(get_integer(j, "hidden_samples", 10000, "config"));
  cfg.grid_bins = static_cast<int>(get_integer(j, "grid_bins", 4, "config"));
  if (cfg.samples < 1) throw ConfigError("samples: must be >= 1");
  if (cfg.hidden_samples < 1) throw ConfigError("hidden_samples: must be >= 1");
  if (cfg.grid_bins < 1) throw ConfigError("grid_bins: must be >= 1");
  cfg.eta_grid = get_grid(j, "eta_grid", cfg.eta_grid, "config");
  for (double e : cfg.eta_grid)
    if (e < 0 || e > 1) throw ConfigError("eta_grid: efficiencies must lie in [0, 1]");
  std::vector<double> tau_grid_file = get_grid(j, "tau_grid", {}, "config");
  for (double t : tau_grid_file) {
    if (!(t > 0)) throw ConfigError("tau_grid: entries must be positive");
    cfg.tau_grid.push_back(t / cfg.time_scale);
  }
  cfg.xi_grid = get_grid(j, "xi_grid", cfg.xi_grid, "config");
  for (double x : cfg.xi_grid)
    if (x < 0) throw ConfigError("xi_grid: entries must be nonnegative");
  cfg.q_grid = get_grid(j, "q_grid", cfg.q_grid, "config");
  for (double q : cfg.q_grid)
    if (q < 1) throw ConfigError("q_grid: entries must be >= 1");
  cfg.points_per_interval =
      static_cast<int>(get_integer(j, "points_per_interval", 257, "config"));
  if (cfg.points_per_interval < 3)
    throw ConfigError("points_per_interval: must be >= 3");

  std::string mode = "whole_record";
  if (j.contains("conditional_mode")) {
    if (!j["conditional_mode"].is_string())
      throw ConfigError("conditional_mode: must be \"whole_record\" or \"chained\"");
    mode = j["conditional_mode"].get<std::string>();
  }
  if (mode == "whole_record")
    cfg.sampler.mode = ConditionalMode::kWholeRecord;
  else if (mode == "chained")
    cfg.sampler.mode = ConditionalMode::kChainedIntervals;
  else
    throw ConfigError("conditional_mode: must be \"whole_record\" or \"chained\"");
  cfg.sampler.max_attempts = get_integer(j, "max_attempts", 1'000'000, "config");
  if (cfg.sampler.max_attempts < 1) throw ConfigError("max_attempts: must be >= 1");

  if (j.contains("records")) {
    if (!j["records"].is_array()) throw ConfigError("records: expected an array of strings");
    for (const auto& r : j["records"]) {
      if (!r.is_string()) throw ConfigError("records: expected strings");
      cfg.records.push_back(r.get<std::string>());
    }
  }

  // Canonical echo: every effective value, sorted keys, fixed formatting.
  json echo;
  if (cfg.two_level) {
    echo["model"] = {{"type", "two_level"},
                     {"omega", cfg.params.omega},
                     {"gamma0", cfg.params.gamma0 / cfg.params.omega},
                     {"epsilon", cfg.params.epsilon / cfg.params.omega},
                     {"beta", cfg.params.beta * cfg.params.omega},
                     {"eta_minus", cfg.params.eta_minus},
                     {"eta_plus", cfg.params.eta_plus}};
  } else {
    json channels = json::array();
    for (const auto& c : cfg.model.channels)
      channels.push_back({{"op", matrix_to_json(c.op)},
                          {"entropy_flux", c.entropy_flux},
                          {"efficiency", c.efficiency},
                          {"reservoir", c.reservoir},
                          {"reverse_index", c.reverse_index}});
    json protocol = json::array();
    for (const auto& s : cfg.model.protocol.segments)
      protocol.push_back(
          {{"duration", s.duration}, {"hamiltonian", matrix_to_json(s.hamiltonian)}});
    json beta = json::object();
    for (const auto& [r, b] : cfg.model.beta) beta[std::to_string(r)] = b;
    echo["model"] = {{"type", "explicit"}, {"dim", cfg.model.dim},
                     {"protocol", protocol}, {"channels", channels},
                     {"beta", beta},         {"time_scale", cfg.time_scale}};
    if (cfg.model.reversal_basis.size() > 0)
      echo["model"]["reversal_basis"] = matrix_to_json(cfg.model.reversal_basis);
  }
  echo["tau"] = cfg.tau * cfg.time_scale;
  echo["seed"] = cfg.seed;
  echo["samples"] = cfg.samples;
  echo["hidden_samples"] = cfg.hidden_samples;
  echo["grid_bins"] = cfg.grid_bins;
  echo["eta_grid"] = cfg.eta_grid;
  if (!cfg.tau_grid.empty()) {
    json tg = json::array();
    for (double t : cfg.tau_grid) tg.push_back(t * cfg.time_scale);
    echo["tau_grid"] = tg;
  }
  echo["xi_grid"] = cfg.xi_grid;
  echo["q_grid"] = cfg.q_grid;
  echo["points_per_interval"] = cfg.points_per_interval;
  echo["conditional_mode"] = mode;
  echo["max_attempts"] = cfg.sampler.max_attempts;
  if (!cfg.records.empty()) echo["records"] = cfg.records;
  cfg.echo = echo.dump();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string default_config_text() {
  return R"({
  "model": {
    "type": "two_level",
    "omega": 1.0,
    "gamma0": 0.001,
    "epsilon": 0.01,
    "beta": 0.2,
    "eta_minus": 0.2,
    "eta_plus": 0.2
  },
  "tau": 1.0,
  "seed": 20260814,
  "samples": 10000,
  "hidden_samples": 10000,
  "grid_bins": 4,
  "eta_grid": [0.2, 0.4, 0.6, 0.8, 1.0],
  "xi_grid": [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
  "q_grid": [1.0, 2.0],
  "points_per_interval": 257,
  "conditional_mode": "whole_record",
  "max_attempts": 1000000
}
)";
}

}  // namespace qjt
