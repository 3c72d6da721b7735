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

#include "qjt/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "qjt/engine.hpp"
#include "qjt/errors.hpp"
#include "qjt/parallel.hpp"

namespace qjt {

EstimateWithError mean_with_error(const std::vector<double>& values) {
  EstimateWithError e;
  e.samples = values.size();
  if (values.empty()) return e;
  double sum = 0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return e;
  double ss = 0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  e.std_error = std::sqrt(ss / (static_cast<double>(values.size()) *
                                static_cast<double>(values.size() - 1)));
  return e;
}

EstimateWithError exp_mean_with_error(const std::vector<double>& log_values) {
  double shift = -std::numeric_limits<double>::infinity();
  for (double x : log_values) shift = std::max(shift, x);
  if (!std::isfinite(shift)) {
    // All samples are exactly zero (or there are none).
    EstimateWithError e;
    e.samples = log_values.size();
    return e;
  }
  std::vector<double> scaled;
  scaled.reserve(log_values.size());
  for (double x : log_values) scaled.push_back(std::exp(x - shift));
  EstimateWithError e = mean_with_error(scaled);
  e.mean *= std::exp(shift);
  e.std_error *= std::exp(shift);
  return e;
}

namespace {

struct Leg {
  double begin = 0;
  double end = 0;
  int terminal_channel = -1;  // -1 for the closing leg
};

struct LegProposal {
  std::vector<JumpEvent> jumps;
  Vector psi_end;  // normalized state at leg end, before any terminal jump
};

// One proposal pass over [leg.begin, leg.end] starting from the normalized
// state `psi`. Returns empty when a monitored jump fires (abort).
std::optional<LegProposal> propose_leg(const Engine& eng, const Leg& leg, Vector psi,
                                       RngStream& rng) {
  LegProposal out;
  const int channels = eng.channel_count();
  std::vector<double> weights(2 * channels);
  double t = leg.begin;
  while (true) {
    double target = rng.uniform_positive();
    auto crossing = eng.locate_norm_crossing(t, leg.end, psi, target);
    if (!crossing) {
      psi = eng.no_jump_apply(t, leg.end, psi);
      double n = psi.norm();
      if (!(n > 0)) return std::nullopt;
      out.psi_end = psi / n;
      return out;
    }
    t = crossing->time;
    psi = crossing->state.normalized();
    // Duplicated-channel draw: monitored copy fires with weight eta <L^+L>,
    // unmonitored with (1 - eta) <L^+L>.
    for (int k = 0; k < channels; ++k) {
      const auto& ch = eng.channel(k);
      double w = std::max(0.0, (psi.adjoint() * ch.num * psi).value().real());
      double eta = eng.model().channels[k].efficiency;
      weights[2 * k] = eta * w;
      weights[2 * k + 1] = (1 - eta) * w;
    }
    int pick = rng.pick(weights);
    if (pick % 2 == 0) return std::nullopt;  // a jump would have been seen
    int k = pick / 2;
    out.jumps.push_back({t, k});
    psi = eng.channel(k).op * psi;
    double n = psi.norm();
    if (!(n > 0)) return std::nullopt;
    psi /= n;
  }
}

// Terminal factor for a finished leg: detected-jump acceptance probability,
// or the Born weight of the fixed final outcome on the closing leg.
double terminal_acceptance(const Engine& eng, const TrajectoryContext& ctx, const Leg& leg,
                           const Vector& psi_end, int fixed_final) {
  if (leg.terminal_channel >= 0) {
    const auto& ch = eng.channel(leg.terminal_channel);
    double w = std::max(0.0, (psi_end.adjoint() * ch.num * psi_end).value().real());
    return ch.lambda_max > 0 ? w / ch.lambda_max : 0.0;
  }
  if (fixed_final < 0) return 1.0;  // free final outcome: no rejection
  Complex amp = ctx.final_basis.vector(fixed_final).adjoint() * psi_end;
  return std::norm(amp);
}

std::vector<Leg> split_legs(const VisibleRecord& rec) {
  std::vector<Leg> legs;
  double t = 0;
  for (const auto& j : rec.jumps) {
    legs.push_back({t, j.time, j.channel});
    t = j.time;
  }
  legs.push_back({t, rec.duration, -1});
  return legs;
}

}  // namespace

HiddenSample sample_hidden_given_visible(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                         RngStream& rng,
                                         const ConditionalSamplerOptions& options) {
  const Engine& eng = *ctx.engine;
  validate_record_shape(rec.jumps, rec.duration, eng.channel_count());
  if (std::abs(rec.duration - ctx.tau) > 1e-9 * std::max(1.0, ctx.tau))
    throw RecordError("record duration does not match context");
  for (const auto& j : rec.jumps) {
    const Channel& ch = ctx.model.channels[j.channel];
    if (!(ch.efficiency > 0))
      throw RecordError("detected jump on unmonitored channel " + std::to_string(j.channel));
    if (!(eng.channel(j.channel).lambda_max > 0))
      throw RecordError("detected jump on a vanishing channel " + std::to_string(j.channel));
  }

  const std::vector<Leg> legs = split_legs(rec);
  const Vector psi0 = ctx.initial.vector(rec.initial_outcome);
  const int fixed_final = options.fixed_final_outcome ? rec.final_outcome : -1;

  HiddenSample sample;

  // With every channel monitored perfectly there is no hidden copy to fire:
  // the only completion with nonzero weight is the record itself, and
  // rejection would merely rediscover it at a cost set by the record's own
  // (possibly tiny) probability. Evolve once to check feasibility and, for a
  // free final outcome, draw it from the Born rule.
  bool any_hidden = false;
  for (const auto& c : ctx.model.channels)
    if (c.efficiency < 1.0) any_hidden = true;
  if (!any_hidden) {
    sample.attempts = 1;
    Vector psi = psi0;
    for (const Leg& leg : legs) {
      psi = eng.no_jump_apply(leg.begin, leg.end, psi);
      if (leg.terminal_channel >= 0) psi = eng.channel(leg.terminal_channel).op * psi;
      double n = psi.norm();
      if (!(n > 0)) return sample;  // zero-probability record
      psi /= n;
    }
    if (fixed_final < 0) {
      std::vector<double> born(ctx.final_basis.size());
      for (int m = 0; m < ctx.final_basis.size(); ++m)
        born[m] = std::norm((ctx.final_basis.vector(m).adjoint() * psi).value());
      sample.final_outcome = rng.pick(born);
    } else if (!(std::norm((ctx.final_basis.vector(fixed_final).adjoint() * psi).value()) >
                 0)) {
      return sample;  // pinned outcome orthogonal to the evolved state
    }
    sample.completed = true;
    return sample;
  }

  if (options.mode == ConditionalMode::kChainedIntervals) {
    Vector psi = psi0;
    for (const Leg& leg : legs) {
      bool accepted = false;
      for (long a = 0; a < options.max_attempts; ++a) {
        ++sample.attempts;
        auto prop = propose_leg(eng, leg, psi, rng);
        if (!prop) continue;
        double p = terminal_acceptance(eng, ctx, leg, prop->psi_end, fixed_final);
        if (rng.uniform() >= p) continue;
        sample.hidden.jumps.insert(sample.hidden.jumps.end(), prop->jumps.begin(),
                                   prop->jumps.end());
        psi = prop->psi_end;
        if (leg.terminal_channel >= 0)
          psi = (eng.channel(leg.terminal_channel).op * psi).normalized();
        accepted = true;
        break;
      }
      if (!accepted) return sample;  // budget exhausted, completed stays false
    }
    if (fixed_final < 0) {
      std::vector<double> born(ctx.final_basis.size());
      for (int m = 0; m < ctx.final_basis.size(); ++m)
        born[m] = std::norm((ctx.final_basis.vector(m).adjoint() * psi).value());
      sample.final_outcome = rng.pick(born);
    }
    sample.completed = true;
    return sample;
  }

  // kWholeRecord: restart everything on any rejection.
  for (long a = 0; a < options.max_attempts; ++a) {
    ++sample.attempts;
    Vector psi = psi0;
    std::vector<JumpEvent> jumps;
    bool rejected = false;
    for (const Leg& leg : legs) {
      auto prop = propose_leg(eng, leg, psi, rng);
      if (!prop) {
        rejected = true;
        break;
      }
      double p = terminal_acceptance(eng, ctx, leg, prop->psi_end, fixed_final);
      if (rng.uniform() >= p) {
        rejected = true;
        break;
      }
      jumps.insert(jumps.end(), prop->jumps.begin(), prop->jumps.end());
      psi = prop->psi_end;
      if (leg.terminal_channel >= 0)
        psi = (eng.channel(leg.terminal_channel).op * psi).normalized();
    }
    if (rejected) continue;
    sample.hidden.jumps = std::move(jumps);
    if (fixed_final < 0) {
      std::vector<double> born(ctx.final_basis.size());
      for (int m = 0; m < ctx.final_basis.size(); ++m)
        born[m] = std::norm((ctx.final_basis.vector(m).adjoint() * psi).value());
      sample.final_outcome = rng.pick(born);
    }
    sample.completed = true;
    return sample;
  }
  return sample;
}

FullRecord compose_full_record(const VisibleRecord& rec, const HiddenSample& sample) {
  FullRecord full = merge_records(rec, sample.hidden);
  if (sample.final_outcome >= 0) full.final_outcome = sample.final_outcome;
  return full;
}

namespace {

ConditionalBatch batch_impl(const VisibleRecord& rec, const TrajectoryContext& ctx, int count,
                            std::uint64_t seed, const ConditionalSamplerOptions& options,
                            bool parallel) {
  std::vector<HiddenSample> samples(static_cast<std::size_t>(count));
  indexed_loop(count, parallel, [&](int i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    samples[static_cast<std::size_t>(i)] = sample_hidden_given_visible(rec, ctx, rng, options);
  });
  ConditionalBatch batch;
  batch.records.reserve(samples.size());
  for (const auto& s : samples) {
    batch.total_attempts += s.attempts;
    if (!s.completed) {
      ++batch.failed;
      continue;
    }
    batch.records.push_back(compose_full_record(rec, s));
  }
  return batch;
}

}  // namespace

ConditionalBatch sample_conditional_batch(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                          int count, std::uint64_t seed,
                                          const ConditionalSamplerOptions& options) {
  return batch_impl(rec, ctx, count, seed, options, true);
}

ConditionalBatch sample_conditional_batch_serial(const VisibleRecord& rec,
                                                 const TrajectoryContext& ctx, int count,
                                                 std::uint64_t seed,
                                                 const ConditionalSamplerOptions& options) {
  return batch_impl(rec, ctx, count, seed, options, false);
}

}  // namespace qjt
