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

#include "qjt/context.hpp"
#include "qjt/records.hpp"
#include "qjt/sampling.hpp"
#include "qjt/thermo.hpp"

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

TEST_CASE("entropy breakdown: boundary term, per-jump heat, and their sum") {
  TrajectoryContext ctx = steady_two_level(500.0, 1.0, 1.0);
  TwoLevelParams p;

  FullRecord rec{0, {{250.0, kEmission}}, 0, 500.0};
  ThermoBreakdown tb = entropy_production(rec, ctx);
  // One emission delivers Delta s = beta*omega to the bath: heat omega, flux beta*omega.
  CHECK(tb.heat.at(0) == doctest::Approx(p.omega).epsilon(1e-12));
  CHECK(tb.flux == doctest::Approx(p.beta * p.omega).epsilon(1e-12));
  double pn = ctx.initial.probabilities(0);
  double qm = ctx.final_basis.probabilities(0);
  CHECK(tb.delta_s_sys == doctest::Approx(std::log(pn) - std::log(qm)).epsilon(1e-12));
  CHECK(tb.s_tot == doctest::Approx(tb.delta_s_sys + tb.flux).epsilon(1e-12));

  // An emission-absorption pair carries zero net flux.
  FullRecord pair{0, {{200.0, kEmission}, {300.0, kAbsorption}}, 0, 500.0};
  CHECK(entropy_production(pair, ctx).flux == doctest::Approx(0.0));

  CHECK_THROWS_AS(entropy_production(FullRecord{5, {}, 0, 500.0}, ctx), RecordError);
}

TEST_CASE("zero-probability boundary outcomes raise DivergenceError") {
  TwoLevelParams p;
  p.tau = 500.0;
  Model m = build_two_level_model(p);
  Matrix ground = Matrix::Zero(2, 2);
  ground(0, 0) = 1;
  TrajectoryContext ctx = make_context(m, ground);
  // The pure initial state puts probability zero on its second eigenvector.
  REQUIRE(ctx.initial.probabilities(1) == doctest::Approx(0.0));
  FullRecord rec{1, {}, 0, 500.0};
  CHECK_THROWS_AS(entropy_production(rec, ctx), DivergenceError);
}

TEST_CASE("two-path identity: amplitude log-ratio equals the entropy bookkeeping") {
  TrajectoryContext ctx = steady_two_level(1000.0, 1.0, 1.0);
  auto ensemble = sample_ensemble(ctx, 100, 2026);
  double worst = 0;
  for (const auto& rec : ensemble) {
    ThermoBreakdown tb = entropy_production(rec, ctx);
    worst = std::max(worst, std::abs(two_path_log_ratio(rec, ctx) - tb.s_tot));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("perfect detection pins the visible estimator to the full entropy") {
  TrajectoryContext ctx = steady_two_level(500.0, 1.0, 1.0);
  auto ensemble = sample_ensemble(ctx, 50, 7);
  for (const auto& rec : ensemble) {
    SigmaBreakdown sb = sigma_estimator(as_visible(rec), ctx);
    ThermoBreakdown tb = entropy_production(rec, ctx);
    CHECK(std::abs(sb.sigma - tb.s_tot) <= 1e-9);
    CHECK(sb.phi == doctest::Approx(sb.sigma - sb.delta_s_sys).epsilon(1e-12));
    CHECK(sb.sigma == doctest::Approx(sb.log_p - sb.log_p_reversed).epsilon(1e-12));
  }
}

TEST_CASE("a click the detector cannot produce diverges the estimator") {
  TrajectoryContext ctx = steady_two_level(500.0, 0.5, 0.0);
  VisibleRecord rec{0, {{250.0, kAbsorption}}, 0, 500.0};
  CHECK_THROWS_AS(sigma_estimator(rec, ctx), DivergenceError);
}

TEST_CASE("conditional fluctuation theorem holds within three standard errors") {
  TrajectoryContext ctx = steady_two_level(500.0, 0.2, 0.2);
  VisibleRecord rec{0, {{250.0, kEmission}}, 0, 500.0};
  ConditionalFtCheck chk = check_conditional_ft(rec, ctx, 4000, 55, {});
  CHECK(chk.failed == 0);
  CHECK(chk.deviation_in_se <= 3.0);
  CHECK(chk.exp_neg_sigma == doctest::Approx(std::exp(-chk.sigma)).epsilon(1e-12));
}

TEST_CASE("degenerate conditional: perfect detection gives zero deviation") {
  TrajectoryContext ctx = steady_two_level(500.0, 1.0, 1.0);
  VisibleRecord rec{0, {{250.0, kEmission}}, 0, 500.0};
  ConditionalFtCheck chk = check_conditional_ft(rec, ctx, 200, 3, {});
  // Every completion is the record itself: the sample error is pure rounding
  // and the soft-floored deviation stays far below the 3-sigma threshold.
  CHECK(chk.conditional.std_error <= 1e-12);
  CHECK(chk.deviation_in_se <= 1e-3);
}

TEST_CASE("global fluctuation theorems on a sampled ensemble") {
  TrajectoryContext ctx = steady_two_level(1000.0, 0.2, 0.2);
  GlobalFtCheck chk = check_global_fts(ctx, 1500, 404, 200);
  CHECK(std::abs(chk.exp_neg_s_tot.mean - 1.0) <= 3 * chk.exp_neg_s_tot.std_error + 1e-9);
  CHECK(std::abs(chk.exp_neg_sigma.mean - 1.0) <= 3 * chk.exp_neg_sigma.std_error + 1e-9);
  CHECK(chk.sigma_mean.mean >= -3 * chk.sigma_mean.std_error - 1e-9);
  CHECK(chk.max_identity_error <= 1e-9);
  CHECK(chk.identity_checks == 200);
  CHECK(std::isfinite(chk.max_abs_sigma));
  CHECK(chk.records_with_visible_jumps > 0);
}

TEST_CASE("closed-form conditional heat at perfect detection is the jump tally") {
  TwoLevelParams p;
  TrajectoryContext ctx = steady_two_level(500.0, 1.0, 1.0);
  VisibleRecord rec{0, {{150.0, kEmission}, {400.0, kAbsorption}}, 0, 500.0};
  ConditionalHeat ch = conditional_heat_closed_form(rec, ctx, 129);
  CHECK(ch.hidden_part.at(0) == doctest::Approx(0.0));
  CHECK(ch.visible_part.at(0) == doctest::Approx(0.0).epsilon(1e-12));  // +omega then -omega
  CHECK(ch.m_summed.at(0) == doctest::Approx(ch.visible_part.at(0) + ch.hidden_part.at(0)));
  CHECK(ch.as_written.at(0) ==
        doctest::Approx(ch.p_final_given_visible * ch.m_summed.at(0)).epsilon(1e-12));
  CHECK(ch.p_final_given_visible > 0);
  CHECK(ch.p_final_given_visible <= 1.0);
}

TEST_CASE("hidden heat integral contributes for a click-free partially observed record") {
  TrajectoryContext ctx = steady_two_level(500.0, 0.2, 0.2);
  VisibleRecord quiet{0, {}, 0, 500.0};
  ConditionalHeat ch = conditional_heat_closed_form(quiet, ctx, 257);
  CHECK(ch.visible_part.at(0) == 0.0);
  CHECK(ch.m_summed.at(0) == doctest::Approx(ch.hidden_part.at(0)));
  CHECK(ch.hidden_part.at(0) != 0.0);
}

TEST_CASE("moment bounds: degenerate equality at perfect detection") {
  TrajectoryContext ctx = steady_two_level(500.0, 1.0, 1.0);
  VisibleRecord rec{0, {{250.0, kEmission}}, 0, 500.0};
  BoundHierarchyCheck bh = check_bound_hierarchy(rec, ctx, 300, 9, {});
  CHECK(bh.ok1);
  CHECK(bh.ok2);
  CHECK(bh.ok4);
  CHECK(bh.moment1.std_error <= 1e-12);
  CHECK(std::abs(bh.moment1.mean - bh.sigma) <= 1e-9);
}

TEST_CASE("moment bounds hold with imperfect detection") {
  TrajectoryContext ctx = steady_two_level(500.0, 0.3, 0.3);
  VisibleRecord quiet{0, {}, 0, 500.0};
  BoundHierarchyCheck bh = check_bound_hierarchy(quiet, ctx, 3000, 12, {});
  CHECK(bh.failed == 0);
  CHECK(bh.ok1);
  CHECK(bh.ok2);
  CHECK(bh.ok4);
  // The first moment gap is strictly positive here, well beyond noise.
  CHECK(bh.moment1.mean - bh.sigma > 3 * bh.moment1.std_error);
}

TEST_CASE("heat bound at perfect detection reduces to equality") {
  TrajectoryContext ctx = steady_two_level(500.0, 1.0, 1.0);
  VisibleRecord rec{0, {{250.0, kEmission}}, 0, 500.0};
  HeatBoundCheck hb = check_heat_bound(rec, ctx, 300, 77, {});
  CHECK(hb.satisfied);
  CHECK(hb.beta_heat.std_error <= 1e-12);
  CHECK(std::abs(hb.phi - hb.beta_heat.mean) <= 1e-9);
  CHECK(hb.heat_sampled.at(0) == doctest::Approx(1.0).epsilon(1e-9));  // one emission
}

TEST_CASE("averaged fluctuation theorems in the degenerate perfect-detection case") {
  TrajectoryContext ctx = steady_two_level(500.0, 1.0, 1.0);
  std::vector<JumpEvent> jumps{{250.0, kEmission}};
  AveragedFtCheck chk = check_averaged_fts(jumps, ctx, 200, 15, {});
  REQUIRE(!chk.per_initial.empty());
  for (const auto& row : chk.per_initial) {
    CHECK(row.ok);
    CHECK(row.rhs.std_error <= 1e-12);
  }
  CHECK(chk.summed_ok);
  CHECK(chk.inequality_ok);
}

TEST_CASE("averaged fluctuation theorems with hidden content") {
  TrajectoryContext ctx = steady_two_level(400.0, 0.3, 0.3);
  std::vector<JumpEvent> jumps{{200.0, kEmission}};
  AveragedFtCheck chk = check_averaged_fts(jumps, ctx, 2500, 21, {});
  CHECK(chk.failed == 0);
  for (const auto& row : chk.per_initial) CHECK(row.ok);
  CHECK(chk.summed_ok);
  CHECK(chk.inequality_ok);
  CHECK(chk.rhs_posterior.mean > 0);
}

TEST_CASE("scaled cumulant estimate vanishes at perfect detection") {
  TrajectoryContext ctx = steady_two_level(500.0, 1.0, 1.0);
  VisibleRecord rec{0, {{250.0, kEmission}}, 0, 500.0};
  EstimateWithError k = scaled_cgf(rec, ctx, 2.0, 200, 5, {});
  CHECK(std::abs(k.mean) <= 1e-12);
}

TEST_CASE("tail bounds on a partially observed record") {
  TrajectoryContext ctx = steady_two_level(500.0, 0.3, 0.3);
  VisibleRecord quiet{0, {}, 0, 500.0};
  TailBoundsReport rep =
      check_tail_bounds(quiet, ctx, {0.0, 0.5, 1.0}, {1.0, 2.0}, 3000, 33, {});
  CHECK(rep.failed == 0);
  CHECK(rep.amplification_ok);
  REQUIRE(!rep.rows.empty());
  for (const auto& row : rep.rows) {
    CHECK(row.satisfied);
    CHECK(row.empirical >= 0);
    CHECK(row.empirical <= 1);
    if (row.side == "left") CHECK(row.bound == doctest::Approx(std::exp(-row.xi)));
  }
  // xi = 0 left tail: the bound is 1 and can never be violated.
  CHECK(rep.rows.front().bound == doctest::Approx(1.0));
}
