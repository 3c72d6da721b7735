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

#include "qjt/sampling.hpp"

#include <algorithm>

#include "qjt/errors.hpp"
#include "qjt/parallel.hpp"

namespace qjt {

namespace {

int sample_outcome(const MeasurementBasis& basis, RngStream& rng) {
  std::vector<double> w(basis.size());
  for (int i = 0; i < basis.size(); ++i) w[i] = std::max(0.0, basis.probabilities(i));
  return rng.pick(w);
}

int sample_born(const MeasurementBasis& basis, const Vector& psi, RngStream& rng) {
  std::vector<double> w(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    Complex amp = basis.vectors.col(i).adjoint() * psi;
    w[i] = std::norm(amp);
  }
  return rng.pick(w);
}

}  // namespace

FullRecord sample_ideal_trajectory(const TrajectoryContext& ctx, RngStream& rng) {
  const Engine& eng = *ctx.engine;
  FullRecord rec;
  rec.duration = ctx.tau;
  rec.initial_outcome = sample_outcome(ctx.initial, rng);

  Vector psi = ctx.initial.vector(rec.initial_outcome);
  double t = 0;
  while (t < ctx.tau) {
    double target = rng.uniform_positive();
    auto crossing = eng.locate_norm_crossing(t, ctx.tau, psi, target);
    if (!crossing) {
      psi = eng.no_jump_apply(t, ctx.tau, psi);
      break;
    }
    Vector at_jump = crossing->state.normalized();
    std::vector<double> w(eng.channel_count());
    for (int k = 0; k < eng.channel_count(); ++k)
      w[k] = (at_jump.adjoint() * eng.channel(k).num * at_jump).value().real();
    int k = rng.pick(w);
    rec.jumps.push_back({crossing->time, k});
    psi = (eng.channel(k).op * at_jump).normalized();
    t = crossing->time;
  }
  rec.final_outcome = sample_born(ctx.final_basis, psi.normalized(), rng);
  return rec;
}

std::pair<VisibleRecord, HiddenRecord> coarse_grain(const FullRecord& rec, const Model& model,
                                                    RngStream& rng) {
  VisibleRecord vis;
  vis.initial_outcome = rec.initial_outcome;
  vis.final_outcome = rec.final_outcome;
  vis.duration = rec.duration;
  HiddenRecord hid;
  for (const auto& j : rec.jumps) {
    if (j.channel < 0 || j.channel >= static_cast<int>(model.channels.size()))
      throw RecordError("coarse_grain: jump channel out of range");
    if (rng.uniform() < model.channels[j.channel].efficiency)
      vis.jumps.push_back(j);
    else
      hid.jumps.push_back(j);
  }
  return {std::move(vis), std::move(hid)};
}

namespace {

std::vector<FullRecord> ensemble_impl(const TrajectoryContext& ctx, int count,
                                      std::uint64_t seed, bool parallel) {
  std::vector<FullRecord> out(count);
  indexed_loop(count, parallel, [&](int i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    out[i] = sample_ideal_trajectory(ctx, rng);
  });
  return out;
}

}  // namespace

std::vector<FullRecord> sample_ensemble_serial(const TrajectoryContext& ctx, int count,
                                               std::uint64_t seed) {
  return ensemble_impl(ctx, count, seed, false);
}

std::vector<FullRecord> sample_ensemble(const TrajectoryContext& ctx, int count,
                                        std::uint64_t seed) {
  return ensemble_impl(ctx, count, seed, true);
}

}  // namespace qjt
