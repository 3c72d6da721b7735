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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "qjt/conditioning.hpp"
#include "qjt/context.hpp"
#include "qjt/propagators.hpp"
#include "qjt/records.hpp"
#include "qjt/sampling.hpp"

using namespace qjt;

namespace {

TrajectoryContext steady_two_level(double tau, double eta_minus, double eta_plus) {
  TwoLevelParams p;
  p.tau = tau;
  p.eta_minus = eta_minus;
  p.eta_plus = eta_plus;
  return make_steady_state_context(build_two_level_model(p));
}

}  // namespace

TEST_CASE("parallel ensemble is bitwise identical to the serial reference") {
  TrajectoryContext ctx = steady_two_level(2000.0, 0.2, 0.2);
  const int n = 200;
  auto par = sample_ensemble(ctx, n, 99);
  auto ser = sample_ensemble_serial(ctx, n, 99);
  REQUIRE(par.size() == ser.size());
  for (int i = 0; i < n; ++i)
    CHECK(format_record(par[i], 1e-3) == format_record(ser[i], 1e-3));
}

TEST_CASE("ensembles are reproducible in the seed and sensitive to it") {
  TrajectoryContext ctx = steady_two_level(1000.0, 1.0, 1.0);
  auto a = sample_ensemble(ctx, 50, 7);
  auto b = sample_ensemble(ctx, 50, 7);
  auto c = sample_ensemble(ctx, 50, 8);
  bool same = true, differs = false;
  for (int i = 0; i < 50; ++i) {
    same = same && format_record(a[i], 1e-3) == format_record(b[i], 1e-3);
    differs = differs || format_record(a[i], 1e-3) != format_record(c[i], 1e-3);
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("sampled records are well formed") {
  TrajectoryContext ctx = steady_two_level(1500.0, 0.5, 0.5);
  auto ensemble = sample_ensemble(ctx, 100, 3);
  for (const auto& rec : ensemble) {
    CHECK(rec.duration == doctest::Approx(ctx.tau));
    CHECK(rec.initial_outcome >= 0);
    CHECK(rec.initial_outcome < ctx.initial.size());
    CHECK(rec.final_outcome >= 0);
    CHECK(rec.final_outcome < ctx.final_basis.size());
    CHECK_NOTHROW(validate_record_shape(rec.jumps, rec.duration,
                                        static_cast<int>(ctx.model.channels.size())));
  }
}

TEST_CASE("steady-state jump counts match the trace formula") {
  const double tau = 2000.0;
  TrajectoryContext ctx = steady_two_level(tau, 1.0, 1.0);
  Matrix rho = steady_state(ctx.model);
  double expected_rate = 0;
  for (const auto& c : ctx.model.channels)
    expected_rate += (c.op.adjoint() * c.op * rho).trace().real();

  const int n = 400;
  auto ensemble = sample_ensemble(ctx, n, 42);
  std::vector<double> counts;
  counts.reserve(n);
  for (const auto& rec : ensemble) counts.push_back(static_cast<double>(rec.jumps.size()));
  EstimateWithError est = mean_with_error(counts);
  double expected = expected_rate * tau;
  CHECK(std::abs(est.mean - expected) <= 3 * est.std_error + 1e-9);
  // The rate itself is a known number for these parameters: about 4.95 gamma0.
  CHECK(expected_rate == doctest::Approx(4.95e-3).epsilon(0.02));
}

TEST_CASE("coarse graining splits records by detector efficiency") {
  TrajectoryContext full_eff = steady_two_level(2000.0, 1.0, 1.0);
  auto ensemble = sample_ensemble(full_eff, 60, 5);

  SUBCASE("perfect detection keeps every jump visible") {
    RngStream rng(1, 0);
    for (const auto& rec : ensemble) {
      auto [vis, hid] = coarse_grain(rec, full_eff.model, rng);
      CHECK(vis.jumps.size() == rec.jumps.size());
      CHECK(hid.jumps.empty());
      CHECK(vis.initial_outcome == rec.initial_outcome);
      CHECK(vis.final_outcome == rec.final_outcome);
      CHECK(vis.duration == doctest::Approx(rec.duration));
    }
  }
  SUBCASE("blind detection hides every jump") {
    TwoLevelParams p;
    p.tau = 2000.0;
    p.eta_minus = 0;
    p.eta_plus = 0;
    Model blind = build_two_level_model(p);
    RngStream rng(2, 0);
    for (const auto& rec : ensemble) {
      auto [vis, hid] = coarse_grain(rec, blind, rng);
      CHECK(vis.jumps.empty());
      CHECK(hid.jumps.size() == rec.jumps.size());
    }
  }
  SUBCASE("every jump lands in exactly one part and merges back") {
    TwoLevelParams p;
    p.tau = 2000.0;
    p.eta_minus = 0.3;
    p.eta_plus = 0.7;
    Model partial = build_two_level_model(p);
    RngStream rng(3, 0);
    for (const auto& rec : ensemble) {
      auto [vis, hid] = coarse_grain(rec, partial, rng);
      CHECK(vis.jumps.size() + hid.jumps.size() == rec.jumps.size());
      FullRecord merged = merge_records(vis, hid);
      REQUIRE(merged.jumps.size() == rec.jumps.size());
      for (std::size_t i = 0; i < rec.jumps.size(); ++i) {
        CHECK(merged.jumps[i].time == doctest::Approx(rec.jumps[i].time));
        CHECK(merged.jumps[i].channel == rec.jumps[i].channel);
      }
    }
  }
  SUBCASE("the visible fraction per channel tracks the efficiency") {
    TwoLevelParams p;
    p.tau = 2000.0;
    p.eta_minus = 0.3;
    p.eta_plus = 0.7;
    Model partial = build_two_level_model(p);
    std::map<int, double> seen, kept;
    auto big = sample_ensemble(full_eff, 300, 21);
    for (std::size_t i = 0; i < big.size(); ++i) {
      RngStream rng(4, i);
      auto [vis, hid] = coarse_grain(big[i], partial, rng);
      for (const auto& j : big[i].jumps) seen[j.channel] += 1;
      for (const auto& j : vis.jumps) kept[j.channel] += 1;
    }
    for (const auto& [k, total] : seen) {
      double eta = partial.channels[k].efficiency;
      double frac = kept[k] / total;
      double se = std::sqrt(eta * (1 - eta) / total);
      CHECK(std::abs(frac - eta) <= 3 * se + 1e-9);
    }
  }
}

TEST_CASE("initial outcomes follow the Born probabilities of the initial basis") {
  TrajectoryContext ctx = steady_two_level(500.0, 1.0, 1.0);
  const int n = 2000;
  auto ensemble = sample_ensemble(ctx, n, 11);
  std::vector<double> freq(ctx.initial.size(), 0.0);
  for (const auto& rec : ensemble) freq[rec.initial_outcome] += 1.0 / n;
  for (int i = 0; i < ctx.initial.size(); ++i) {
    double p = ctx.initial.probabilities(i);
    double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(freq[i] - p) <= 3 * se + 1e-9);
  }
}
