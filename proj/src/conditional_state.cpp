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

#include "qjt/conditional_state.hpp"

#include <cmath>
#include <string>

#include "qjt/errors.hpp"

namespace qjt {

namespace {

Matrix tidy(const Matrix& x) {
  Matrix h = Complex(0.5, 0) * (x + dagger(x));
  double tr = h.trace().real();
  if (!(tr > 0) || !all_finite(h))
    throw RecordError("conditional state lost positivity");
  return h / tr;
}

}  // namespace

ConditionalStatePath evolve_conditional_state(const VisibleRecord& rec,
                                              const TrajectoryContext& ctx,
                                              int points_per_interval) {
  if (points_per_interval < 3)
    throw RecordError("conditional state: need at least 3 grid points");
  if (points_per_interval % 2 == 0) ++points_per_interval;  // Simpson grid
  validate_record_shape(rec.jumps, rec.duration,
                        static_cast<int>(ctx.model.channels.size()));
  if (std::abs(rec.duration - ctx.tau) > 1e-9 * std::max(1.0, ctx.tau))
    throw RecordError("record duration does not match context");

  const Engine& eng = *ctx.engine;
  ConditionalStatePath path;

  Matrix sigma = ctx.initial.projector(rec.initial_outcome);
  double t = 0;
  std::size_t next = 0;
  while (true) {
    double t_end = next < rec.jumps.size() ? rec.jumps[next].time : ctx.tau;
    StatePathInterval leg;
    leg.t_begin = t;
    leg.t_end = t_end;
    leg.times.reserve(points_per_interval);
    leg.states.reserve(points_per_interval);
    double h = (t_end - t) / static_cast<double>(points_per_interval - 1);
    Vector v = vectorize(sigma);
    for (int i = 0; i < points_per_interval; ++i) {
      double ti = i + 1 == points_per_interval ? t_end : t + h * i;
      leg.times.push_back(ti);
      leg.states.push_back(tidy(unvectorize(v, ctx.model.dim)));
      if (i + 1 < points_per_interval) {
        double tn = i + 2 == points_per_interval ? t_end : t + h * (i + 1);
        v = eng.hidden_apply(ti, tn, v);
      }
    }
    sigma = leg.states.back();
    path.intervals.push_back(std::move(leg));
    if (next == rec.jumps.size()) break;

    const auto& jump = rec.jumps[next];
    const Channel& ch = ctx.model.channels[jump.channel];
    if (ch.efficiency <= 0)
      throw RecordError("visible jump on an unmonitored channel " +
                        std::to_string(jump.channel));
    sigma = tidy(ch.op * sigma * dagger(ch.op));
    t = t_end;
    ++next;
  }

  const Matrix& final_sigma = path.final_state();
  RealVector probs(ctx.final_basis.size());
  for (int m = 0; m < ctx.final_basis.size(); ++m) {
    Complex amp = ctx.final_basis.vector(m).adjoint() * final_sigma *
                  ctx.final_basis.vector(m);
    probs[m] = std::max(0.0, amp.real());
  }
  double total = probs.sum();
  if (!(total > 0)) throw RecordError("conditional state: empty final Born rule");
  path.final_outcome_probabilities = probs / total;
  return path;
}

}  // namespace qjt
