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
#include <set>
#include <sstream>

#include "qjt/context.hpp"
#include "qjt/oracle.hpp"
#include "qjt/pathprob.hpp"
#include "qjt/thermo.hpp"

using namespace qjt;

namespace {

TrajectoryContext coarse_context() {
  TwoLevelParams p;
  p.tau = 1000.0;  // one spontaneous-decay time
  p.eta_minus = 0.2;
  p.eta_plus = 0.2;
  return make_steady_state_context(build_two_level_model(p));
}

}  // namespace

TEST_CASE("enumeration mass matches the superoperator product") {
  TrajectoryContext ctx = coarse_context();
  DiscreteEnumeration en = enumerate_discrete(ctx, 3);
  CHECK(en.bins == 3);
  CHECK(en.dt == doctest::Approx(ctx.tau / 3.0));
  CHECK(std::abs(en.total_mass - en.model_mass) <= 1e-12 * std::abs(en.model_mass));
  for (const auto& rec : en.records) {
    CHECK(rec.probability >= 0.0);
    // At most one jump per bin, ordered by bin.
    std::set<int> bins;
    for (const auto& j : rec.jumps) CHECK(bins.insert(j.bin).second);
  }
}

TEST_CASE("visible keys partition the enumeration mass") {
  TrajectoryContext ctx = coarse_context();
  DiscreteEnumeration en = enumerate_discrete(ctx, 3);
  std::vector<DiscreteVisibleKey> keys = all_visible_keys(en);
  double sum = 0;
  std::size_t matched = 0;
  for (const auto& key : keys) {
    OracleConditional oc = oracle_conditional(en, ctx, key);
    sum += oc.p_visible;
    matched += matching_records(en, key, true).size();
  }
  CHECK(sum == doctest::Approx(en.total_mass).epsilon(1e-12));
  CHECK(matched == en.records.size());
}

TEST_CASE("key reversal is an involution") {
  TrajectoryContext ctx = coarse_context();
  DiscreteEnumeration en = enumerate_discrete(ctx, 3);
  for (const auto& key : all_visible_keys(en)) {
    DiscreteVisibleKey twice = reverse_key(reverse_key(key, ctx.model, 3), ctx.model, 3);
    CHECK(twice == key);
  }
}

TEST_CASE("conditional fluctuation identity is exact at any bin width") {
  // The first-order no-jump operator transforms exactly into its reversed
  // counterpart under the antiunitary conjugation, so the identity holds even
  // on this coarse grid where the discrete model is far from the continuum.
  TrajectoryContext ctx = coarse_context();
  DiscreteEnumeration en = enumerate_discrete(ctx, 3);
  double worst_identity = 0, worst_chain = 0;
  int checked = 0;
  for (const auto& key : all_visible_keys(en)) {
    OracleConditional oc = oracle_conditional(en, ctx, key);
    if (!(oc.p_visible > 0)) continue;
    ++checked;
    worst_identity = std::max(worst_identity, std::abs(oc.exp_neg_s - std::exp(-oc.sigma)));
    worst_chain = std::max(worst_chain, std::abs(oc.p_visible_chain / oc.p_visible - 1.0));
    // sigma is the log-ratio of the chain weights by construction.
    CHECK(oc.sigma ==
          doctest::Approx(std::log(oc.p_visible_chain) - std::log(oc.p_visible_reversed))
              .epsilon(1e-12));
  }
  CHECK(checked > 10);
  CHECK(worst_identity <= 1e-10);
  CHECK(worst_chain <= 1e-10);
}

TEST_CASE("jump-count truncation drops mass monotonically") {
  TrajectoryContext ctx = coarse_context();
  DiscreteEnumeration full = enumerate_discrete(ctx, 3);
  DiscreteEnumeration trunc = enumerate_discrete(ctx, 3, 1);
  for (const auto& rec : trunc.records) CHECK(rec.jumps.size() <= 1);
  CHECK(trunc.records.size() < full.records.size());
  CHECK(trunc.total_mass < full.total_mass);
  // Model mass is a property of the model, not of the truncation.
  CHECK(trunc.model_mass == doctest::Approx(full.model_mass).epsilon(1e-12));
}

TEST_CASE("continuous views place jumps at bin midpoints") {
  TrajectoryContext ctx = coarse_context();
  DiscreteEnumeration en = enumerate_discrete(ctx, 3);
  for (const auto& rec : en.records) {
    if (rec.jumps.empty()) continue;
    FullRecord full = to_full_record(rec, en, ctx.tau);
    CHECK(full.duration == doctest::Approx(ctx.tau));
    CHECK(full.initial_outcome == rec.initial_outcome);
    CHECK(full.final_outcome == rec.final_outcome);
    REQUIRE(full.jumps.size() == rec.jumps.size());
    for (std::size_t i = 0; i < rec.jumps.size(); ++i) {
      CHECK(full.jumps[i].time ==
            doctest::Approx((rec.jumps[i].bin + 0.5) * en.dt).epsilon(1e-12));
      CHECK(full.jumps[i].channel == rec.jumps[i].channel);
    }
    break;
  }
  for (const auto& key : all_visible_keys(en)) {
    if (key.jumps.empty()) continue;
    VisibleRecord vis = to_visible_record(key, en, ctx.tau);
    REQUIRE(vis.jumps.size() == key.jumps.size());
    for (std::size_t i = 0; i < key.jumps.size(); ++i)
      CHECK(vis.jumps[i].time ==
            doctest::Approx((key.jumps[i].first + 0.5) * en.dt).epsilon(1e-12));
    break;
  }
}

TEST_CASE("discrete entropy bookkeeping agrees with the continuous one") {
  TrajectoryContext ctx = coarse_context();
  DiscreteEnumeration en = enumerate_discrete(ctx, 3);
  int checked = 0;
  for (const auto& rec : en.records) {
    if (!(rec.probability > 0) || checked >= 40) break;
    ++checked;
    FullRecord full = to_full_record(rec, en, ctx.tau);
    ThermoBreakdown tb = entropy_production(full, ctx);
    CHECK(rec.s_tot == doctest::Approx(tb.s_tot).epsilon(1e-12));
    for (const auto& [r, q] : tb.heat) {
      auto it = rec.heat.find(r);
      double oracle_q = it == rec.heat.end() ? 0.0 : it->second;
      CHECK(oracle_q == doctest::Approx(q).epsilon(1e-12));
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("hidden-summed chain weight matches the brute-force sum") {
  TrajectoryContext ctx = coarse_context();
  DiscreteEnumeration en = enumerate_discrete(ctx, 3);
  int checked = 0;
  for (const auto& key : all_visible_keys(en)) {
    OracleConditional oc = oracle_conditional(en, ctx, key);
    if (!(oc.p_visible > 0) || checked >= 20) break;
    ++checked;
    double lw = discrete_visible_log_weight(ctx, en.bins, key);
    CHECK(std::exp(lw) == doctest::Approx(oc.p_visible).epsilon(1e-10));
    double lwr = discrete_visible_log_weight_reversed(ctx, en.bins, key);
    CHECK(std::exp(lwr) == doctest::Approx(oc.p_visible_reversed).epsilon(1e-10));
  }
  CHECK(checked > 0);
}

TEST_CASE("oracle CSV dump carries one row per enumerated record") {
  TrajectoryContext ctx = coarse_context();
  DiscreteEnumeration en = enumerate_discrete(ctx, 2);
  std::ostringstream os;
  write_oracle_csv(os, en, ctx, 1e-3);
  std::istringstream in(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == en.records.size() + 1);  // header plus one row each
  CHECK(os.str().find("record,visible,probability,s_tot") == 0);
}

namespace {

// Worst relative deviation between enumerated record probabilities (divided
// by dt^J and the per-jump detection factors) and the continuous full-record
// density at the same midpoint jump times.  Records below `floor_p` are
// skipped when requested: their leading amplitude vanishes (e.g. two
// emissions with no re-excitation in between), so a first-order step has
// O(1) relative error there while carrying no measurable mass.
double worst_density_deviation(const DiscreteEnumeration& en,
                               const TrajectoryContext& ctx, double floor_p = 0) {
  double worst = 0;
  for (const auto& rec : en.records) {
    if (!(rec.probability > floor_p)) continue;
    double log_disc =
        std::log(rec.probability) - static_cast<double>(rec.jumps.size()) * std::log(en.dt);
    double eta_log = 0;
    for (const auto& j : rec.jumps) {
      double eta = ctx.model.channels[j.channel].efficiency;
      eta_log += std::log(j.visible ? eta : 1.0 - eta);
    }
    FullRecord full = to_full_record(rec, en, ctx.tau);
    double log_cont = log_path_probability_full(full, ctx) + eta_log;
    worst = std::max(worst, std::abs(std::expm1(log_cont - log_disc)));
  }
  return worst;
}

}  // namespace

TEST_CASE("fine first-order bins track the continuous evaluators to O(dt)") {
  TwoLevelParams p;
  p.tau = 1e-3;
  p.eta_minus = 0.2;
  p.eta_plus = 0.2;
  TrajectoryContext ctx = make_steady_state_context(build_two_level_model(p));
  DiscreteEnumeration en = enumerate_discrete(ctx, 4);
  CHECK(std::abs(en.model_mass - 1.0) <= 1e-9);
  CHECK(worst_density_deviation(en, ctx, 1e-18) <= 1e-4);

  // First-order convergence: a tenfold shorter horizon shrinks the worst
  // deviation by roughly dt; allow a factor-of-four margin on the rate.
  TwoLevelParams q = p;
  q.tau = 1e-4;
  TrajectoryContext cshort = make_steady_state_context(build_two_level_model(q));
  CHECK(worst_density_deviation(enumerate_discrete(cshort, 4), cshort, 1e-18) <=
        worst_density_deviation(en, ctx, 1e-18) / 2.5);
}

TEST_CASE("exact-bin enumeration reproduces the continuous densities at any width") {
  TwoLevelParams p;
  p.eta_minus = 0.2;
  p.eta_plus = 0.7;

  // Per-record densities are exact regardless of bin width.
  for (double tau : {1e-3, 1000.0}) {
    CAPTURE(tau);
    p.tau = tau;
    TrajectoryContext ctx = make_steady_state_context(build_two_level_model(p));
    DiscreteEnumeration en = enumerate_discrete_exact(ctx, 4);
    CHECK(worst_density_deviation(en, ctx) <= 1e-9);
  }

  // Mirrored keys obey the reversal identity record by record, so the
  // entropy-weighted forward mass must equal the reversed-process mass at
  // rounding level for every key, truncated or not.
  p.tau = 1e-3;
  TrajectoryContext ctx = make_steady_state_context(build_two_level_model(p));
  DiscreteEnumeration en = enumerate_discrete_exact(ctx, 4);
  DiscreteEnumeration rev = enumerate_discrete_exact(reverse_context(ctx), 4);
  double worst_bij = 0, worst_vis = 0, worst_sig = 0;
  int checked = 0;
  for (const auto& key : all_visible_keys(en)) {
    double p_fwd = 0, weighted = 0;
    for (const DiscreteRecord* d : matching_records(en, key, true)) {
      p_fwd += d->probability;
      weighted += d->probability * std::exp(-d->s_tot);
    }
    if (p_fwd <= 0) continue;
    double p_rev = 0;
    for (const DiscreteRecord* d :
         matching_records(rev, reverse_key(key, ctx.model, en.bins), true))
      p_rev += d->probability;
    worst_bij = std::max(worst_bij, std::abs(weighted / p_rev - 1.0));

    // Marginalizing hidden completions only reproduces the continuous
    // visible density up to the one-jump-per-bin truncation, whose relative
    // weight is O(hidden rate * dt) for ordinary keys but O(1) for keys
    // dominated by completions the grid cannot hold (two visible emissions
    // in adjacent bins need a hidden absorption with no free bin).  A mass
    // floor skips those degenerate keys.
    if (p_fwd < 1e-18) continue;
    ++checked;
    VisibleRecord vrec = to_visible_record(key, en, ctx.tau);
    double log_disc =
        std::log(p_fwd) - static_cast<double>(key.jumps.size()) * std::log(en.dt);
    worst_vis = std::max(
        worst_vis,
        std::abs(std::expm1(log_path_probability_visible(vrec, ctx) - log_disc)));
    worst_sig = std::max(worst_sig, std::abs(sigma_estimator(vrec, ctx).sigma -
                                             (std::log(p_fwd) - std::log(p_rev))));
  }
  CHECK(checked > 10);
  CHECK(worst_bij <= 1e-9);
  CHECK(worst_vis <= 1e-4);
  CHECK(worst_sig <= 1e-4);
}
