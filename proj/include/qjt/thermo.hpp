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
#include <map>
#include <string>
#include <vector>

#include "qjt/conditional_state.hpp"
#include "qjt/conditioning.hpp"
#include "qjt/context.hpp"
#include "qjt/records.hpp"

namespace qjt {

// Absolute floor added to every 3-sigma statistical tolerance. When all
// conditional completions coincide (eta = 1) the sample standard error is
// exactly zero while the compared quantity comes from an independent code
// path, so the comparison must absorb ~1e-12 rounding noise.
inline constexpr double kZeroSeFloor = 1e-9;

// Entropy bookkeeping of one full record: system entropy change from the
// boundary measurements, per-reservoir heat, and their sum
// s_tot = delta_s_sys + sum_r beta_r * heat_r.
struct ThermoBreakdown {
  double delta_s_sys = 0;
  std::map<int, double> heat;  // reservoir -> heat delivered to it
  double flux = 0;             // sum_r beta_r * heat_r
  double s_tot = 0;
};

// Throws DivergenceError when a boundary outcome has zero probability.
ThermoBreakdown entropy_production(const FullRecord& rec, const TrajectoryContext& ctx);

// ln of the forward/reversed full-record probability ratio, computed from
// the amplitude evaluators. Equals entropy_production(rec).s_tot up to
// rounding; the two sides share no code.
double two_path_log_ratio(const FullRecord& rec, const TrajectoryContext& ctx);

// Irreversibility seen in a visible record: sigma = ln P(gamma) -
// ln P~(gamma~), split into the system part and the effective flux phi.
struct SigmaBreakdown {
  double sigma = 0;
  double delta_s_sys = 0;
  double phi = 0;  // sigma - delta_s_sys
  double log_p = 0;
  double log_p_reversed = 0;
};
SigmaBreakdown sigma_estimator(const VisibleRecord& rec, const TrajectoryContext& ctx);

// Closed-form conditional heat along a visible record: the detected-jump
// fluxes plus the undetected-jump intensity (1 - eta_k) Tr[L_k^+ L_k
// sigma_t] integrated over the filtered state path. `as_written` keeps the
// multiplicative final-outcome probability in front of the whole bracket
// (the published form, checked against sampling and reported);
// `m_summed` drops it and is the form that matches the exact conditional
// average <Q_r | v, n>.
struct ConditionalHeat {
  std::map<int, double> as_written;
  std::map<int, double> m_summed;
  std::map<int, double> visible_part;  // detected-jump contribution
  std::map<int, double> hidden_part;   // integral contribution
  double p_final_given_visible = 0;    // P[m | v, n]
  RealVector final_outcome_probabilities;
};
ConditionalHeat conditional_heat_closed_form(const VisibleRecord& rec,
                                             const TrajectoryContext& ctx,
                                             int points_per_interval = 257);

// Conditional fluctuation theorem <e^{-S_tot} | gamma> = e^{-sigma}.
struct ConditionalFtCheck {
  double sigma = 0;
  double exp_neg_sigma = 0;
  EstimateWithError conditional;  // Monte Carlo <e^{-S_tot} | gamma>
  double deviation_in_se = 0;
  long total_attempts = 0;
  int failed = 0;
};
ConditionalFtCheck check_conditional_ft(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                        int samples, std::uint64_t seed,
                                        const ConditionalSamplerOptions& options = {});

// Global fluctuation theorems <e^{-S_tot}> = 1 over full records and
// <e^{-sigma}> = 1 over their coarse-grained visible records, plus the
// two-path identity |ln(P/P~) - s_tot| on the first `identity_checks`
// records.
struct GlobalFtCheck {
  EstimateWithError exp_neg_s_tot;
  EstimateWithError exp_neg_sigma;
  EstimateWithError sigma_mean;  // <Sigma> >= 0 up to noise (KL nonnegativity)
  double max_identity_error = 0;
  int identity_checks = 0;
  int records_with_visible_jumps = 0;
  double max_abs_sigma = 0;  // finiteness witness across sampled records
};
GlobalFtCheck check_global_fts(const TrajectoryContext& ctx, int trajectories,
                               std::uint64_t seed, int identity_checks = 1000);

// sigma^k <= <S_tot^k | gamma> for k in {1, 2, 4}, within 3 standard errors.
struct BoundHierarchyCheck {
  double sigma = 0;
  EstimateWithError moment1, moment2, moment4;
  bool ok1 = false, ok2 = false, ok4 = false;
  long total_attempts = 0;
  int failed = 0;
};
BoundHierarchyCheck check_bound_hierarchy(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                          int samples, std::uint64_t seed,
                                          const ConditionalSamplerOptions& options = {});

// Conditional tail bounds: Pr(S_tot - sigma < -xi) <= e^{-xi} and
// Pr(S_tot - sigma >= xi) <= e^{-q xi} <e^{q (S_tot - sigma)}>.
struct TailCheckRow {
  std::string side;  // "left" or "right"
  double xi = 0;
  double q = 0;  // 0 on left rows
  double empirical = 0;
  double empirical_se = 0;
  double bound = 0;
  double bound_se = 0;
  bool satisfied = false;
};
struct TailBoundsReport {
  double sigma = 0;
  std::vector<TailCheckRow> rows;
  std::map<double, EstimateWithError> amplification;  // q -> <e^{q(S-sigma)}>
  bool amplification_ok = false;                      // each >= 1 - 3 SE
  long total_attempts = 0;
  int failed = 0;
};
TailBoundsReport check_tail_bounds(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                   const std::vector<double>& xi_grid,
                                   const std::vector<double>& q_grid, int samples,
                                   std::uint64_t seed,
                                   const ConditionalSamplerOptions& options = {});

// Heat bound phi <= sum_r beta_r <Q_r | gamma> (3 SE slack), with the
// conditional heat computed by sampling and in closed form side by side.
struct HeatBoundCheck {
  double phi = 0;
  double sigma = 0;
  std::map<int, double> heat_sampled;  // per-reservoir <Q_r | gamma>
  EstimateWithError beta_heat;         // sum_r beta_r Q_r with error
  ConditionalHeat closed_form;
  bool satisfied = false;
  long total_attempts = 0;
  int failed = 0;
};
HeatBoundCheck check_heat_bound(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                int samples, std::uint64_t seed,
                                const ConditionalSamplerOptions& options = {});

// Fluctuation theorems averaged over the final (and initial) measurement:
// per initial outcome n, sum_m P[m|v,n] e^{-phi} = <e^{-sum beta Q} | n, v>;
// summing n with the initial-state weights p_n gives the measurement-free
// form, and Jensen's inequality per record yields
// sum_r beta_r <Q_r | v> >= sum_{n,m} p_n P[m|v,n] phi.
// The <.|v> averages weight n by p_n(0), the reading under which the summed
// forms are exact identities; the posterior-weighted variant (n weighted by
// its likelihood given v) is also computed and reported, not asserted.
struct AveragedFtRow {
  int initial_outcome = 0;
  double lhs = 0;            // sum_m P[m|v,n] e^{-phi}
  EstimateWithError rhs;     // sampled <e^{-sum beta Q} | n, v>
  bool ok = false;
};
struct AveragedFtCheck {
  std::vector<AveragedFtRow> per_initial;
  double lhs_summed = 0;         // sum_n p_n lhs_n
  EstimateWithError rhs_summed;  // prior-weighted combination
  bool summed_ok = false;
  EstimateWithError rhs_posterior;  // reported only
  EstimateWithError beta_heat;      // sum_r beta_r <Q_r | v>, prior-weighted
  double phi_weighted = 0;          // sum_{n,m} p_n P[m|v,n] phi
  bool inequality_ok = false;
  long total_attempts = 0;
  int failed = 0;
};
AveragedFtCheck check_averaged_fts(const std::vector<JumpEvent>& visible_jumps,
                                   const TrajectoryContext& ctx, int samples_per_initial,
                                   std::uint64_t seed,
                                   const ConditionalSamplerOptions& options = {});

// Finite-horizon scaled-cumulant estimate ln <e^{q (S_tot - sigma)} |
// gamma> / tau (no asymptotic claim; standard error by the delta method).
EstimateWithError scaled_cgf(const VisibleRecord& rec, const TrajectoryContext& ctx, double q,
                             int samples, std::uint64_t seed,
                             const ConditionalSamplerOptions& options = {});

}  // namespace qjt
