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

#include "qjt/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qjt/errors.hpp"
#include "qjt/parallel.hpp"
#include "qjt/pathprob.hpp"
#include "qjt/sampling.hpp"

namespace qjt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> batch_s_tot(const ConditionalBatch& batch, const TrajectoryContext& ctx) {
  std::vector<double> s;
  s.reserve(batch.records.size());
  for (const auto& rec : batch.records) s.push_back(entropy_production(rec, ctx).s_tot);
  return s;
}

void require_completions(const ConditionalBatch& batch) {
  if (batch.records.empty())
    throw AttemptBudgetError("conditional sampler produced no completed samples");
}

}  // namespace

ThermoBreakdown entropy_production(const FullRecord& rec, const TrajectoryContext& ctx) {
  if (rec.initial_outcome < 0 || rec.initial_outcome >= ctx.initial.size() ||
      rec.final_outcome < 0 || rec.final_outcome >= ctx.final_basis.size())
    throw RecordError("entropy_production: outcome index out of range");
  double pn = ctx.initial.probabilities[rec.initial_outcome];
  double qm = ctx.final_basis.probabilities[rec.final_outcome];
  if (!(pn > 0) || !(qm > 0))
    throw DivergenceError("zero boundary probability", format_record(rec, 1.0));
  ThermoBreakdown b;
  b.delta_s_sys = std::log(pn) - std::log(qm);
  for (const auto& j : rec.jumps) {
    const Channel& ch = ctx.model.channels.at(j.channel);
    b.heat[ch.reservoir] += ch.entropy_flux / ctx.model.beta.at(ch.reservoir);
    b.flux += ch.entropy_flux;
  }
  b.s_tot = b.delta_s_sys + b.flux;
  return b;
}

double two_path_log_ratio(const FullRecord& rec, const TrajectoryContext& ctx) {
  double fwd = log_path_probability_full(rec, ctx);
  double rev = log_path_probability_full_reversed(rec, ctx);
  if (!std::isfinite(fwd) || !std::isfinite(rev))
    throw DivergenceError("zero path probability", format_record(rec, 1.0));
  return fwd - rev;
}

SigmaBreakdown sigma_estimator(const VisibleRecord& rec, const TrajectoryContext& ctx) {
  SigmaBreakdown s;
  s.log_p = log_path_probability_visible(rec, ctx);
  s.log_p_reversed = log_path_probability_visible_reversed(rec, ctx);
  if (!std::isfinite(s.log_p) || !std::isfinite(s.log_p_reversed))
    throw DivergenceError("zero visible path probability",
                          format_record(rec, 1.0));
  s.sigma = s.log_p - s.log_p_reversed;
  double pn = ctx.initial.probabilities[rec.initial_outcome];
  double qm = ctx.final_basis.probabilities[rec.final_outcome];
  s.delta_s_sys = std::log(pn) - std::log(qm);
  s.phi = s.sigma - s.delta_s_sys;
  return s;
}

ConditionalHeat conditional_heat_closed_form(const VisibleRecord& rec,
                                             const TrajectoryContext& ctx,
                                             int points_per_interval) {
  ConditionalStatePath path = evolve_conditional_state(rec, ctx, points_per_interval);
  ConditionalHeat out;
  out.final_outcome_probabilities = path.final_outcome_probabilities;
  out.p_final_given_visible = path.final_outcome_probabilities[rec.final_outcome];

  for (const auto& [r, beta] : ctx.model.beta) {
    out.visible_part[r] = 0;
    out.hidden_part[r] = 0;
  }
  for (const auto& j : rec.jumps) {
    const Channel& ch = ctx.model.channels[j.channel];
    out.visible_part[ch.reservoir] += ch.entropy_flux / ctx.model.beta.at(ch.reservoir);
  }
  for (const auto& [r, beta] : ctx.model.beta) {
    out.hidden_part[r] = path.integrate([&](double, const Matrix& sigma) {
      double rate = 0;
      for (std::size_t k = 0; k < ctx.model.channels.size(); ++k) {
        const Channel& ch = ctx.model.channels[k];
        if (ch.reservoir != r) continue;
        double occ = (ctx.engine->channel(static_cast<int>(k)).num * sigma).trace().real();
        rate += (1 - ch.efficiency) * std::max(0.0, occ) * ch.entropy_flux;
      }
      return rate / beta;
    });
    out.m_summed[r] = out.visible_part[r] + out.hidden_part[r];
    out.as_written[r] = out.p_final_given_visible * out.m_summed[r];
  }
  return out;
}

ConditionalFtCheck check_conditional_ft(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                        int samples, std::uint64_t seed,
                                        const ConditionalSamplerOptions& options) {
  ConditionalFtCheck out;
  SigmaBreakdown sb = sigma_estimator(rec, ctx);
  out.sigma = sb.sigma;
  out.exp_neg_sigma = std::exp(-sb.sigma);

  ConditionalBatch batch = sample_conditional_batch(rec, ctx, samples, seed, options);
  require_completions(batch);
  out.total_attempts = batch.total_attempts;
  out.failed = batch.failed;

  std::vector<double> neg_s;
  neg_s.reserve(batch.records.size());
  for (const auto& full : batch.records)
    neg_s.push_back(-entropy_production(full, ctx).s_tot);
  out.conditional = exp_mean_with_error(neg_s);
  double gap = std::abs(out.conditional.mean - out.exp_neg_sigma);
  // Soft standard error: the kZeroSeFloor/3 term keeps the ratio finite when
  // every completion coincides (eta = 1) and the sample error is pure rounding,
  // so "deviation <= 3" is exactly "gap <= 3 se + kZeroSeFloor".
  out.deviation_in_se = gap / (out.conditional.std_error + kZeroSeFloor / 3);
  return out;
}

GlobalFtCheck check_global_fts(const TrajectoryContext& ctx, int trajectories,
                               std::uint64_t seed, int identity_checks) {
  GlobalFtCheck out;
  std::vector<double> neg_s(trajectories), neg_sigma(trajectories);
  std::vector<double> identity_err(std::min(trajectories, identity_checks), 0.0);
  std::vector<char> has_visible(trajectories, 0);
  std::vector<double> abs_sigma(trajectories, 0.0);

  indexed_loop(trajectories, true, [&](int i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    FullRecord full = sample_ideal_trajectory(ctx, rng);
    auto [vis, hid] = coarse_grain(full, ctx.model, rng);
    ThermoBreakdown tb = entropy_production(full, ctx);
    SigmaBreakdown sb = sigma_estimator(vis, ctx);
    neg_s[i] = -tb.s_tot;
    neg_sigma[i] = -sb.sigma;
    has_visible[i] = vis.jumps.empty() ? 0 : 1;
    abs_sigma[i] = std::abs(sb.sigma);
    if (i < static_cast<int>(identity_err.size()))
      identity_err[i] = std::abs(two_path_log_ratio(full, ctx) - tb.s_tot);
  });

  out.exp_neg_s_tot = exp_mean_with_error(neg_s);
  out.exp_neg_sigma = exp_mean_with_error(neg_sigma);
  std::vector<double> sigma(neg_sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = -neg_sigma[i];
  out.sigma_mean = mean_with_error(sigma);
  out.identity_checks = static_cast<int>(identity_err.size());
  for (double e : identity_err) out.max_identity_error = std::max(out.max_identity_error, e);
  for (char v : has_visible) out.records_with_visible_jumps += v;
  for (double a : abs_sigma) out.max_abs_sigma = std::max(out.max_abs_sigma, a);
  return out;
}

BoundHierarchyCheck check_bound_hierarchy(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                          int samples, std::uint64_t seed,
                                          const ConditionalSamplerOptions& options) {
  BoundHierarchyCheck out;
  out.sigma = sigma_estimator(rec, ctx).sigma;
  ConditionalBatch batch = sample_conditional_batch(rec, ctx, samples, seed, options);
  require_completions(batch);
  out.total_attempts = batch.total_attempts;
  out.failed = batch.failed;

  std::vector<double> s = batch_s_tot(batch, ctx);
  std::vector<double> s2(s.size()), s4(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s2[i] = s[i] * s[i];
    s4[i] = s2[i] * s2[i];
  }
  out.moment1 = mean_with_error(s);
  out.moment2 = mean_with_error(s2);
  out.moment4 = mean_with_error(s4);
  double g = out.sigma;
  out.ok1 = g <= out.moment1.mean + 3 * out.moment1.std_error + kZeroSeFloor;
  out.ok2 = g * g <= out.moment2.mean + 3 * out.moment2.std_error + kZeroSeFloor;
  out.ok4 = g * g * g * g <= out.moment4.mean + 3 * out.moment4.std_error + kZeroSeFloor;
  return out;
}

TailBoundsReport check_tail_bounds(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                   const std::vector<double>& xi_grid,
                                   const std::vector<double>& q_grid, int samples,
                                   std::uint64_t seed,
                                   const ConditionalSamplerOptions& options) {
  TailBoundsReport out;
  out.sigma = sigma_estimator(rec, ctx).sigma;
  ConditionalBatch batch = sample_conditional_batch(rec, ctx, samples, seed, options);
  require_completions(batch);
  out.total_attempts = batch.total_attempts;
  out.failed = batch.failed;

  std::vector<double> diff = batch_s_tot(batch, ctx);
  for (double& d : diff) d -= out.sigma;
  const double m = static_cast<double>(diff.size());

  out.amplification_ok = true;
  for (double q : q_grid) {
    std::vector<double> qd(diff.size());
    for (std::size_t i = 0; i < diff.size(); ++i) qd[i] = q * diff[i];
    EstimateWithError amp = exp_mean_with_error(qd);
    out.amplification[q] = amp;
    if (amp.mean < 1 - 3 * amp.std_error - kZeroSeFloor) out.amplification_ok = false;
  }

  for (double xi : xi_grid) {
    TailCheckRow left;
    left.side = "left";
    left.xi = xi;
    double hits = 0;
    for (double d : diff) hits += d < -xi ? 1 : 0;
    left.empirical = hits / m;
    left.empirical_se = std::sqrt(left.empirical * (1 - left.empirical) / m);
    left.bound = std::exp(-xi);
    left.satisfied = left.empirical <= left.bound + 3 * left.empirical_se;
    out.rows.push_back(left);

    for (double q : q_grid) {
      TailCheckRow right;
      right.side = "right";
      right.xi = xi;
      right.q = q;
      double rhits = 0;
      for (double d : diff) rhits += d >= xi ? 1 : 0;
      right.empirical = rhits / m;
      right.empirical_se = std::sqrt(right.empirical * (1 - right.empirical) / m);
      const EstimateWithError& amp = out.amplification[q];
      right.bound = std::exp(-q * xi) * amp.mean;
      right.bound_se = std::exp(-q * xi) * amp.std_error;
      double slack = 3 * std::sqrt(right.empirical_se * right.empirical_se +
                                   right.bound_se * right.bound_se);
      right.satisfied = right.empirical <= right.bound + slack;
      out.rows.push_back(right);
    }
  }
  return out;
}

HeatBoundCheck check_heat_bound(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                int samples, std::uint64_t seed,
                                const ConditionalSamplerOptions& options) {
  HeatBoundCheck out;
  SigmaBreakdown sb = sigma_estimator(rec, ctx);
  out.phi = sb.phi;
  out.sigma = sb.sigma;
  out.closed_form = conditional_heat_closed_form(rec, ctx);

  ConditionalBatch batch = sample_conditional_batch(rec, ctx, samples, seed, options);
  require_completions(batch);
  out.total_attempts = batch.total_attempts;
  out.failed = batch.failed;

  std::vector<double> flux;
  flux.reserve(batch.records.size());
  for (const auto& full : batch.records) {
    ThermoBreakdown tb = entropy_production(full, ctx);
    flux.push_back(tb.flux);
    for (const auto& [r, q] : tb.heat) out.heat_sampled[r] += q;
  }
  for (auto& [r, q] : out.heat_sampled) q /= static_cast<double>(batch.records.size());
  out.beta_heat = mean_with_error(flux);
  out.satisfied = out.phi <= out.beta_heat.mean + 3 * out.beta_heat.std_error + kZeroSeFloor;
  return out;
}

AveragedFtCheck check_averaged_fts(const std::vector<JumpEvent>& visible_jumps,
                                   const TrajectoryContext& ctx, int samples_per_initial,
                                   std::uint64_t seed,
                                   const ConditionalSamplerOptions& options) {
  AveragedFtCheck out;
  ConditionalSamplerOptions free_final = options;
  free_final.fixed_final_outcome = false;

  double lhs_sum = 0;
  double rhs_mean = 0, rhs_var = 0;
  double heat_mean = 0, heat_var = 0;
  double phi_weighted = 0;
  std::vector<double> posterior_logw, posterior_mean;

  for (int n = 0; n < ctx.initial.size(); ++n) {
    double pn = ctx.initial.probabilities[n];
    if (!(pn > 0)) continue;
    VisibleRecord rec;
    rec.initial_outcome = n;
    rec.jumps = visible_jumps;
    rec.final_outcome = 0;
    rec.duration = ctx.tau;

    // Exact final-outcome conditionals and per-(n, m) effective fluxes.
    ConditionalStatePath path = evolve_conditional_state(rec, ctx);
    double lhs_n = 0;
    for (int mm = 0; mm < ctx.final_basis.size(); ++mm) {
      double pm = path.final_outcome_probabilities[mm];
      if (!(pm > 0)) continue;
      VisibleRecord rec_m = rec;
      rec_m.final_outcome = mm;
      double phi = sigma_estimator(rec_m, ctx).phi;
      lhs_n += pm * std::exp(-phi);
      phi_weighted += pn * pm * phi;
    }

    // Sampled <e^{-sum_r beta_r Q_r} | n, v> with the final outcome free.
    ConditionalBatch batch =
        sample_conditional_batch(rec, ctx, samples_per_initial, seed + n, free_final);
    require_completions(batch);
    out.total_attempts += batch.total_attempts;
    out.failed += batch.failed;
    std::vector<double> neg_flux, flux;
    neg_flux.reserve(batch.records.size());
    for (const auto& full : batch.records) {
      ThermoBreakdown tb = entropy_production(full, ctx);
      neg_flux.push_back(-tb.flux);
      flux.push_back(tb.flux);
    }
    EstimateWithError rhs_n = exp_mean_with_error(neg_flux);
    EstimateWithError heat_n = mean_with_error(flux);

    AveragedFtRow row;
    row.initial_outcome = n;
    row.lhs = lhs_n;
    row.rhs = rhs_n;
    row.ok = std::abs(lhs_n - rhs_n.mean) <= 3 * rhs_n.std_error + kZeroSeFloor;
    out.per_initial.push_back(row);

    lhs_sum += pn * lhs_n;
    rhs_mean += pn * rhs_n.mean;
    rhs_var += pn * pn * rhs_n.std_error * rhs_n.std_error;
    heat_mean += pn * heat_n.mean;
    heat_var += pn * pn * heat_n.std_error * heat_n.std_error;

    posterior_logw.push_back(log_visible_weight_final_summed(rec, ctx));
    posterior_mean.push_back(rhs_n.mean);
  }

  out.lhs_summed = lhs_sum;
  out.rhs_summed = {rhs_mean, std::sqrt(rhs_var), static_cast<std::size_t>(out.per_initial.size())};
  out.summed_ok =
      std::abs(out.lhs_summed - out.rhs_summed.mean) <= 3 * out.rhs_summed.std_error + kZeroSeFloor;

  // Posterior weighting (n given v), reported for comparison.
  double wmax = -kInf;
  for (double lw : posterior_logw) wmax = std::max(wmax, lw);
  double wsum = 0, post = 0;
  for (std::size_t i = 0; i < posterior_logw.size(); ++i) {
    double w = std::exp(posterior_logw[i] - wmax);
    wsum += w;
    post += w * posterior_mean[i];
  }
  out.rhs_posterior = {wsum > 0 ? post / wsum : 0.0, 0.0, posterior_logw.size()};

  out.beta_heat = {heat_mean, std::sqrt(heat_var), static_cast<std::size_t>(out.per_initial.size())};
  out.phi_weighted = phi_weighted;
  out.inequality_ok =
      out.beta_heat.mean + 3 * out.beta_heat.std_error + kZeroSeFloor >= out.phi_weighted;
  return out;
}

EstimateWithError scaled_cgf(const VisibleRecord& rec, const TrajectoryContext& ctx, double q,
                             int samples, std::uint64_t seed,
                             const ConditionalSamplerOptions& options) {
  double sigma = sigma_estimator(rec, ctx).sigma;
  ConditionalBatch batch = sample_conditional_batch(rec, ctx, samples, seed, options);
  require_completions(batch);
  std::vector<double> qd = batch_s_tot(batch, ctx);
  for (double& d : qd) d = q * (d - sigma);
  EstimateWithError amp = exp_mean_with_error(qd);
  EstimateWithError k;
  k.samples = amp.samples;
  k.mean = std::log(amp.mean) / ctx.tau;
  k.std_error = amp.mean > 0 ? amp.std_error / (amp.mean * ctx.tau) : kInf;
  return k;
}

}  // namespace qjt
