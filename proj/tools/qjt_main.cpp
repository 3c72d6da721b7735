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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qjt/config.hpp"
#include "qjt/errors.hpp"
#include "qjt/scenarios.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qjt::ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Apply command-line overrides to the raw JSON before parsing so the echoed
// configuration (and therefore every output byte) reflects effective values.
qjt::RunConfig config_with_overrides(const std::string& path, long long* seed,
                                     int* samples) {
  std::string text = path.empty() ? qjt::default_config_text() : read_file(path);
  if (seed || samples) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw qjt::ConfigError(std::string("config parse error: ") + e.what());
    }
    if (seed) j["seed"] = *seed;
    if (samples) {
      j["samples"] = *samples;
      j["hidden_samples"] = *samples;
    }
    text = j.dump();
  }
  return qjt::parse_config(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-jump trajectories under imperfect detection"};
  app.require_subcommand(1);

  std::string config_path, scenario, out_dir;
  long long seed_override = 0;
  int samples_override = 0;

  CLI::App* run = app.add_subcommand("run", "run a scenario and write its CSV outputs");
  run->add_option("--config", config_path, "JSON configuration file")->required();
  run->add_option("--scenario", scenario, "registered scenario name")->required();
  run->add_option("--out", out_dir, "output directory (created if missing)")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed_override, "override the seed");
  CLI::Option* samples_opt =
      run->add_option("--samples", samples_override,
                      "override both the trajectory and hidden sample counts");

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a configuration");
  std::string validate_path;
  validate->add_option("--config", validate_path, "JSON configuration file")->required();

  CLI::App* list = app.add_subcommand("list-scenarios", "list registered scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& info : qjt::list_scenarios())
        std::cout << info.name << "\t" << info.summary << "\n";
      return 0;
    }
    if (validate->parsed()) {
      qjt::RunConfig cfg = qjt::parse_config(read_file(validate_path));
      std::cout << "ok\n" << cfg.echo << "\n";
      return 0;
    }

    qjt::RunConfig cfg = config_with_overrides(
        config_path, seed_opt->count() ? &seed_override : nullptr,
        samples_opt->count() ? &samples_override : nullptr);
    qjt::ScenarioResult result = qjt::run_scenario(scenario, cfg);

    std::filesystem::create_directories(out_dir);
    for (const auto& [file, bytes] : result.outputs) {
      std::ofstream out(std::filesystem::path(out_dir) / file, std::ios::binary);
      out << bytes;
      if (!out) {
        std::cerr << "error: cannot write " << file << " under " << out_dir << "\n";
        return 1;
      }
    }

    int failed = 0;
    for (const auto& a : result.assertions) {
      if (!a.pass) ++failed;
      std::printf("[%s] %s: observed %.12g %s tolerance %.12g%s%s\n",
                  a.pass ? "PASS" : "FAIL", a.name.c_str(), a.observed,
                  a.relation.c_str(), a.tolerance, a.note.empty() ? "" : " -- ",
                  a.note.c_str());
    }
    std::printf("%s: %zu assertions, %d failed; outputs in %s\n", scenario.c_str(),
                result.assertions.size(), failed, out_dir.c_str());
    return failed == 0 ? 0 : 1;
  } catch (const qjt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
