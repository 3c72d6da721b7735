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
//
// Acceptance suite: ten end-to-end checks, one [PASS]/[FAIL] line each.
// Every check runs a registered scenario on a pinned configuration, requires
// the named assertion rows to pass, and enforces a wall-clock budget.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qjt/config.hpp"
#include "qjt/scenarios.hpp"

using nlohmann::json;
using qjt::AssertionRow;
using qjt::RunConfig;
using qjt::ScenarioResult;

namespace {

void merge_into(json& base, const json& overrides) {
  for (const auto& [key, value] : overrides.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object())
      merge_into(base[key], value);
    else
      base[key] = value;
  }
}

RunConfig make_config(const json& overrides) {
  json j = json::parse(qjt::default_config_text());
  merge_into(j, overrides);
  return qjt::parse_config(j.dump());
}

struct TimedRun {
  ScenarioResult result;
  double seconds = 0;
};

TimedRun run_timed(const std::string& scenario, const RunConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  TimedRun out{qjt::run_scenario(scenario, cfg), 0};
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
  return out;
}

const AssertionRow* find_row(const ScenarioResult& r, const std::string& name) {
  for (const auto& row : r.assertions)
    if (row.name == name) return &row;
  return nullptr;
}

// Collect the rows selected by `keep`; missing expectations count as failures.
struct RowCheck {
  std::vector<const AssertionRow*> rows;
  std::vector<std::string> failures;

  void require(const ScenarioResult& r, const std::string& name) {
    const AssertionRow* row = find_row(r, name);
    if (!row) {
      failures.push_back("missing assertion row \"" + name + "\"");
      return;
    }
    rows.push_back(row);
    if (!row->pass) failures.push_back(describe(*row));
  }

  void require_prefix(const ScenarioResult& r, const std::string& prefix) {
    int found = 0;
    for (const auto& row : r.assertions) {
      if (row.name.rfind(prefix, 0) != 0) continue;
      ++found;
      rows.push_back(&row);
      if (!row.pass) failures.push_back(describe(row));
    }
    if (found == 0) failures.push_back("no assertion rows with prefix \"" + prefix + "\"");
  }

  void require_all(const ScenarioResult& r) {
    for (const auto& row : r.assertions) {
      rows.push_back(&row);
      if (!row.pass) failures.push_back(describe(row));
    }
    if (r.assertions.empty()) failures.push_back("scenario produced no assertion rows");
  }

  static std::string describe(const AssertionRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s: observed %.12g %s tolerance %.12g",
                  row.name.c_str(), row.observed, row.relation.c_str(),
                  row.tolerance);
    std::string out = buf;
    if (!row.note.empty()) out += " -- " + row.note;
    return out;
  }
};

int g_failures = 0;

void report(const std::string& label, const std::string& what, bool pass,
            const std::string& detail, double seconds, double budget,
            const std::vector<std::string>& failures) {
  bool in_budget = seconds < budget;
  bool ok = pass && in_budget;
  if (!ok) ++g_failures;
  std::printf("[%s] %s %s (%s%.1f s < %.0f s budget)\n", ok ? "PASS" : "FAIL",
              label.c_str(), what.c_str(),
              detail.empty() ? "" : (detail + "; ").c_str(), seconds, budget);
  if (!in_budget)
    std::printf("         wall time %.1f s exceeds the %.0f s budget\n", seconds, budget);
  for (const auto& f : failures) std::printf("         %s\n", f.c_str());
  std::fflush(stdout);
}

void run_criterion(const std::string& label, const std::string& what, double budget,
                   const std::function<void(RowCheck&, double&, std::string&)>& body) {
  RowCheck check;
  double seconds = 0;
  std::string detail;
  try {
    body(check, seconds, detail);
  } catch (const std::exception& e) {
    check.failures.push_back(std::string("exception: ") + e.what());
  }
  report(label, what, check.failures.empty(), detail, seconds, budget,
         check.failures);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

int main() {
  std::printf("qjt acceptance suite\n");

  // The enumeration scenario backs both the pointwise-identity check and the
  // conditional-heat cross-check; run it once and time it once.
  TimedRun oracle;
  bool oracle_ok = true;
  std::string oracle_error;
  try {
    oracle = run_timed("oracle-validate", make_config(json::object()));
  } catch (const std::exception& e) {
    oracle_ok = false;
    oracle_error = e.what();
  }

  run_criterion(
      "A1", "exact enumeration validates the conditional fluctuation identity pointwise",
      10.0, [&](RowCheck& check, double& seconds, std::string& detail) {
        if (!oracle_ok) throw std::runtime_error(oracle_error);
        seconds = oracle.seconds;
        for (const char* name :
             {"enumeration-mass-consistency", "conditional-ft-identity-max-error",
              "visible-chain-consistency", "pointwise-reversal-identity",
              "fine-mass-near-unity", "fine-conditional-ft-identity-max-error",
              "first-order-density-agreement", "full-density-cross-check",
              "exact-reversal-identity", "visible-density-cross-check",
              "sigma-cross-check"})
          check.require(oracle.result, name);
        if (const AssertionRow* row =
                find_row(oracle.result, "conditional-ft-identity-max-error"))
          detail = "max identity error " + fmt(row->observed);
      });

  run_criterion(
      "A2",
      "conditional fluctuation checks pass for 0-, 1-, and 2-jump records with "
      "1/sqrt(M) error scaling",
      300.0, [&](RowCheck& check, double& seconds, std::string& detail) {
        TimedRun run = run_timed("ft-conditional", make_config(json::object()));
        seconds = run.seconds;
        for (int i = 0; i < 3; ++i) {
          check.require(run.result, "record-" + std::to_string(i) + "-conditional-ft");
          check.require(run.result, "record-" + std::to_string(i) + "-se-scaling");
        }
        double worst = 0;
        for (const auto* row : check.rows)
          if (row->name.find("conditional-ft") != std::string::npos)
            worst = std::max(worst, row->observed);
        detail = "worst deviation " + fmt(worst) + " standard errors";
      });

  run_criterion(
      "A3", "global fluctuation identities hold within three standard errors", 120.0,
      [&](RowCheck& check, double& seconds, std::string& detail) {
        TimedRun run = run_timed("ft-global", make_config(json::object()));
        seconds = run.seconds;
        check.require(run.result, "exp-neg-s-tot-unity");
        check.require(run.result, "exp-neg-sigma-unity");
        check.require(run.result, "sigma-mean-nonnegative");
        if (const AssertionRow* row = find_row(run.result, "exp-neg-s-tot-unity"))
          detail = "|<exp(-s_tot)> - 1| deviation " + fmt(row->observed) +
                   " standard errors";
      });

  run_criterion(
      "A4",
      "click-free mean bound: gap vanishes at full efficiency, shrinks with "
      "efficiency, grows with horizon",
      600.0, [&](RowCheck& check, double& seconds, std::string& detail) {
        TimedRun run = run_timed("bound-eta-sweep", make_config(json::object()));
        seconds = run.seconds;
        check.require_all(run.result);
        detail = std::to_string(check.rows.size()) + " rows";
      });

  run_criterion(
      "A5", "tail bounds on the visible irreversibility hold for every xi and q",
      600.0, [&](RowCheck& check, double& seconds, std::string& detail) {
        json overrides;
        overrides["model"] = {{"eta_minus", 0.5}, {"eta_plus", 0.2}};
        TimedRun run = run_timed("tail-bounds", make_config(overrides));
        seconds = run.seconds;
        check.require_all(run.result);
        detail = std::to_string(check.rows.size()) + " rows";
      });

  run_criterion(
      "A6", "conditional second-law bound phi <= beta*heat holds on all records",
      600.0, [&](RowCheck& check, double& seconds, std::string& detail) {
        TimedRun run = run_timed("heat-bound", make_config(json::object()));
        seconds = run.seconds;
        check.require_all(run.result);
        detail = std::to_string(check.rows.size()) + " rows";
      });

  run_criterion(
      "A7",
      "jump-averaged conditional states reproduce the ensemble master equation",
      120.0, [&](RowCheck& check, double& seconds, std::string& detail) {
        TimedRun run = run_timed("lindblad-check", make_config(json::object()));
        seconds = run.seconds;
        check.require_prefix(run.result, "trace-distance-eta-");
        double worst = 0;
        for (const auto* row : check.rows) worst = std::max(worst, row->observed);
        detail = "worst trace distance " + fmt(worst);
      });

  run_criterion(
      "A8", "two independent entropy-production decompositions agree pointwise",
      60.0, [&](RowCheck& check, double& seconds, std::string& detail) {
        TimedRun run = run_timed("ft-global", make_config(json{{"samples", 1000}}));
        seconds = run.seconds;
        check.require(run.result, "two-path-identity-max-error");
        if (const AssertionRow* row = find_row(run.result, "two-path-identity-max-error"))
          detail = "max |direct - decomposed| " + fmt(row->observed);
      });

  run_criterion(
      "A9", "hidden-summed conditional heat matches the enumeration oracle", 30.0,
      [&](RowCheck& check, double& seconds, std::string& detail) {
        if (!oracle_ok) throw std::runtime_error(oracle_error);
        seconds = oracle.seconds;
        check.require(oracle.result, "m-summed-heat-cross-check");
        if (const AssertionRow* row =
                find_row(oracle.result, "as-written-heat-discrepancy"))
          detail = "as-written form deviates by " + fmt(row->observed) +
                   " (reported, not bounded)";
      });

  run_criterion(
      "A10", "one-sided detection keeps the visible irreversibility finite", 60.0,
      [&](RowCheck& check, double& seconds, std::string& detail) {
        json overrides;
        overrides["model"] = {{"eta_plus", 0.0}, {"eta_minus", 0.5}};
        overrides["samples"] = 2000;
        TimedRun run = run_timed("ft-global", make_config(overrides));
        seconds = run.seconds;
        check.require(run.result, "exchange-sigma-finite");
        check.require(run.result, "exchange-emission-records");
        check.require(run.result, "exchange-exp-neg-sigma-unity");
        if (const AssertionRow* row = find_row(run.result, "exchange-sigma-finite"))
          detail = "max |sigma| " + fmt(row->observed);
      });

  std::printf("acceptance: %d/10 criteria passed\n", 10 - g_failures);
  return g_failures;
}
