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

#include "qjt/pathprob.hpp"

#include <cmath>
#include <limits>

namespace qjt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_against_context(int n, int m, const std::vector<JumpEvent>& jumps, double duration,
                           const TrajectoryContext& ctx) {
  if (std::abs(duration - ctx.tau) > 1e-9 * std::max(1.0, ctx.tau))
    throw RecordError("record duration does not match context");
  if (n < 0 || n >= ctx.initial.size() || m < 0 || m >= ctx.final_basis.size())
    throw RecordError("record outcome out of range");
  validate_record_shape(jumps, duration, static_cast<int>(ctx.model.channels.size()));
}

double trace_of_vectorized(const Vector& vec_x, int d) {
  Complex tr = 0;
  for (int i = 0; i < d; ++i) tr += vec_x(i * d + i);
  return tr.real();
}

}  // namespace

double log_path_probability_full(const FullRecord& rec, const TrajectoryContext& ctx) {
  check_against_context(rec.initial_outcome, rec.final_outcome, rec.jumps, rec.duration, ctx);
  const Engine& eng = *ctx.engine;
  double pn = ctx.initial.probabilities(rec.initial_outcome);
  if (pn <= 0) return kNegInf;

  double log_w = std::log(pn);
  Vector psi = ctx.initial.vector(rec.initial_outcome);
  double t = 0;
  for (const auto& j : rec.jumps) {
    psi = eng.no_jump_apply(t, j.time, psi);
    psi = eng.channel(j.channel).op * psi;
    double nrm = psi.norm();
    if (nrm == 0) return kNegInf;
    log_w += 2 * std::log(nrm);
    psi /= nrm;
    t = j.time;
  }
  psi = eng.no_jump_apply(t, ctx.tau, psi);
  Complex amp = ctx.final_basis.vector(rec.final_outcome).adjoint() * psi;
  double a = std::abs(amp);
  if (a == 0) return kNegInf;
  return log_w + 2 * std::log(a);
}

double log_path_probability_full_reversed(const FullRecord& rec,
                                          const TrajectoryContext& ctx) {
  return log_path_probability_full(reverse_record(rec, ctx.model), reverse_context(ctx));
}

namespace {

double log_visible_weight(const VisibleRecord& rec, const TrajectoryContext& ctx,
                          bool sum_final) {
  check_against_context(rec.initial_outcome, rec.final_outcome, rec.jumps, rec.duration, ctx);
  const Engine& eng = *ctx.engine;
  const int d = eng.dim();
  double pn = ctx.initial.probabilities(rec.initial_outcome);
  if (pn <= 0) return kNegInf;

  double log_w = std::log(pn);
  Vector x = vectorize(ctx.initial.projector(rec.initial_outcome));
  double t = 0;
  for (const auto& j : rec.jumps) {
    const auto& ch = ctx.model.channels[j.channel];
    x = eng.hidden_apply(t, j.time, x);
    x = ch.efficiency * (eng.channel(j.channel).jump_super * x);
    double tr = trace_of_vectorized(x, d);
    if (tr <= 0) return kNegInf;
    log_w += std::log(tr);
    x /= tr;
    t = j.time;
  }
  x = eng.hidden_apply(t, ctx.tau, x);
  double w;
  if (sum_final) {
    w = trace_of_vectorized(x, d);
  } else {
    Vector vm = ctx.final_basis.vector(rec.final_outcome);
    w = (vm.adjoint() * unvectorize(x, d) * vm).value().real();
  }
  if (w <= 0) return kNegInf;
  return log_w + std::log(w);
}

}  // namespace

double log_path_probability_visible(const VisibleRecord& rec, const TrajectoryContext& ctx) {
  return log_visible_weight(rec, ctx, /*sum_final=*/false);
}

double log_path_probability_visible_reversed(const VisibleRecord& rec,
                                             const TrajectoryContext& ctx) {
  return log_path_probability_visible(reverse_record(rec, ctx.model), reverse_context(ctx));
}

double log_visible_weight_final_summed(const VisibleRecord& rec,
                                       const TrajectoryContext& ctx) {
  return log_visible_weight(rec, ctx, /*sum_final=*/true);
}

}  // namespace qjt
