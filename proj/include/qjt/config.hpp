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

#include <cstdint>
#include <string>
#include <vector>

#include "qjt/conditioning.hpp"
#include "qjt/model.hpp"

namespace qjt {

// Parsed and validated run configuration. Times in the file are given in
// units of 1/gamma0 (multiples of the spontaneous-decay timescale) and
// converted to the model's internal units here; `time_scale` converts back
// for serialization.
struct RunConfig {
  bool two_level = true;
  TwoLevelParams params;  // source parameters when two_level is set
  Model model;
  double time_scale = 1.0;  // internal time * time_scale = file time units
  double tau = 0;           // horizon, internal units
  std::uint64_t seed = 20260814;
  int samples = 10000;         // trajectories for ensemble checks
  int hidden_samples = 10000;  // hidden-jump samples for conditional checks
  int grid_bins = 4;           // enumeration bins
  std::vector<double> eta_grid{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> tau_grid;  // internal units; scenarios default if empty
  std::vector<double> xi_grid{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<double> q_grid{1.0, 2.0};
  int points_per_interval = 257;
  ConditionalSamplerOptions sampler;
  std::vector<std::string> records;  // serialized, file time units
  std::string echo;                  // canonical JSON echo of the full config
};

// Parse a JSON configuration. Unknown keys anywhere are rejected. See
// default_config_text() for the schema with defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// The default configuration as a commented-free JSON document.
std::string default_config_text();

}  // namespace qjt
