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

#pragma once

#include <map>
#include <string>
#include <vector>

#include "qjt/config.hpp"

namespace qjt {

inline constexpr const char* kVersion = "qjt 1.0.0";

// One checked relation: pass iff `observed relation tolerance` with relation
// "<=" or ">=". Monte Carlo tolerances already include their 3-standard-error
// slack; oracle tolerances are absolute.
struct AssertionRow {
  std::string name;
  double observed = 0;
  std::string relation = "<=";
  double tolerance = 0;
  bool pass = false;
  std::string note;
};

struct ScenarioResult {
  std::string scenario;
  std::string config_echo;
  std::vector<AssertionRow> assertions;
  // File name -> complete file contents (CSV with a config-echo header).
  // Always contains "assertions.csv".
  std::map<std::string, std::string> outputs;

  bool passed() const;
};

struct ScenarioInfo {
  std::string name;
  std::string summary;
};

const std::vector<ScenarioInfo>& list_scenarios();

// Run a registered scenario. Throws ConfigError for unknown names or configs
// the scenario cannot use (for example an explicit-matrix model handed to an
// efficiency-sweeping scenario). Deterministic: identical configs produce
// identical output bytes.
ScenarioResult run_scenario(const std::string& name, const RunConfig& config);

}  // namespace qjt
