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

#include "qjt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <tuple>

#include "qjt/engine.hpp"
#include "qjt/errors.hpp"
#include "qjt/propagators.hpp"

namespace qjt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// One per-bin branch: an operator and, when it is a jump, its channel.
struct Branch {
  Matrix op;
  int channel = -1;  // -1 for the no-jump branch
  bool visible = false;
};

std::vector<KrausStep> bin_steps(const Model& model, double tau, int bins) {
  if (bins < 1) throw ModelError("enumeration needs at least one bin");
  double dt = tau / bins;
  std::vector<KrausStep> steps;
  steps.reserve(bins);
  for (int b = 0; b < bins; ++b)
    steps.push_back(kraus_step(model, (b + 0.5) * dt, dt));
  return steps;
}

std::vector<std::vector<Branch>> bin_branches(const std::vector<KrausStep>& steps) {
  std::vector<std::vector<Branch>> branches(steps.size());
  for (std::size_t b = 0; b < steps.size(); ++b) {
    branches[b].push_back({steps[b].no_jump, -1, false});
    for (const auto& [k, op] : steps[b].visible) branches[b].push_back({op, k, true});
    for (const auto& [k, op] : steps[b].hidden) branches[b].push_back({op, k, false});
  }
  return branches;
}

// Exact-propagator bins: the no-jump branch is the exact propagator over the
// bin and each jump branch sandwiches sqrt(eta dt) L between the exact half
// propagators, so a record's probability equals the continuous path density
// times dt^J exactly (same matrix products), at any bin width.
std::vector<std::vector<Branch>> exact_bin_branches(const Model& model, double tau,
                                                    int bins) {
  if (bins < 1) throw ModelError("enumeration needs at least one bin");
  Engine eng(model);
  double dt = tau / bins;
  std::vector<std::vector<Branch>> branches(bins);
  for (int b = 0; b < bins; ++b) {
    double t0 = b * dt;
    double tm = (b + 0.5) * dt;
    double t1 = (b + 1) * dt;
    Matrix first = eng.no_jump_matrix(t0, tm);
    Matrix second = eng.no_jump_matrix(tm, t1);
    branches[b].push_back({eng.no_jump_matrix(t0, t1), -1, false});
    for (std::size_t k = 0; k < model.channels.size(); ++k) {
      const Channel& c = model.channels[k];
      Matrix mid = std::sqrt(dt) * (second * c.op * first);
      if (c.efficiency > 0)
        branches[b].push_back(
            {std::sqrt(c.efficiency) * mid, static_cast<int>(k), true});
      if (c.efficiency < 1)
        branches[b].push_back(
            {std::sqrt(1.0 - c.efficiency) * mid, static_cast<int>(k), false});
    }
  }
  return branches;
}

}  // namespace

bool DiscreteVisibleKey::operator<(const DiscreteVisibleKey& o) const {
  return std::tie(initial_outcome, final_outcome, jumps) <
         std::tie(o.initial_outcome, o.final_outcome, o.jumps);
}

bool DiscreteVisibleKey::operator==(const DiscreteVisibleKey& o) const {
  return initial_outcome == o.initial_outcome && final_outcome == o.final_outcome &&
         jumps == o.jumps;
}

DiscreteVisibleKey visible_key(const DiscreteRecord& rec) {
  DiscreteVisibleKey key;
  key.initial_outcome = rec.initial_outcome;
  key.final_outcome = rec.final_outcome;
  for (const auto& j : rec.jumps)
    if (j.visible) key.jumps.emplace_back(j.bin, j.channel);
  return key;
}

namespace {

DiscreteEnumeration enumerate_branches(const TrajectoryContext& ctx,
                                       const std::vector<std::vector<Branch>>& branches,
                                       int bins, int max_jumps) {
  const Model& model = ctx.model;
  double patterns = 1;
  for (const auto& b : branches) patterns *= static_cast<double>(b.size());
  if (patterns * ctx.initial.size() > 2e7)
    throw ModelError("enumeration too large: " + fmt(patterns) + " patterns");

  DiscreteEnumeration out;
  out.bins = bins;
  out.dt = ctx.tau / bins;

  // Exact mass of the discrete model, all branches summed.
  Matrix full = Matrix::Identity(model.dim * model.dim, model.dim * model.dim);
  for (int b = 0; b < bins; ++b) {
    Matrix step = Matrix::Zero(model.dim * model.dim, model.dim * model.dim);
    for (const auto& br : branches[b]) step += kron(br.op.conjugate(), br.op);
    full = step * full;
  }
  for (int n = 0; n < ctx.initial.size(); ++n) {
    Matrix evolved = unvectorize(full * vectorize(ctx.initial.projector(n)), model.dim);
    out.model_mass += ctx.initial.probabilities[n] * evolved.trace().real();
  }

  // Depth-first walk over branch patterns, one amplitude chain per initial
  // outcome.
  std::vector<DiscreteJump> jumps;
  std::vector<int> choice(bins, 0);
  for (int n = 0; n < ctx.initial.size(); ++n) {
    double pn = ctx.initial.probabilities[n];
    std::vector<Vector> stack(bins + 1);
    stack[0] = ctx.initial.vector(n);
    int depth = 0;
    while (depth >= 0) {
      if (depth == bins) {
        for (int m = 0; m < ctx.final_basis.size(); ++m) {
          DiscreteRecord rec;
          rec.initial_outcome = n;
          rec.final_outcome = m;
          rec.jumps = jumps;
          Complex amp = ctx.final_basis.vector(m).adjoint() * stack[bins];
          rec.probability = pn * std::norm(amp);
          double flux = 0;
          for (const auto& j : jumps) {
            const Channel& ch = model.channels[j.channel];
            flux += ch.entropy_flux;
            rec.heat[ch.reservoir] += ch.entropy_flux / model.beta.at(ch.reservoir);
          }
          if (rec.probability > 0) {
            double qm = ctx.final_basis.probabilities[m];
            if (!(pn > 0) || !(qm > 0))
              throw ModelError("enumeration: record with zero boundary probability");
            rec.s_tot = std::log(pn) - std::log(qm) + flux;
          }
          out.total_mass += rec.probability;
          out.records.push_back(std::move(rec));
        }
        --depth;
        if (branches[depth][choice[depth]].channel >= 0) jumps.pop_back();
        ++choice[depth];
        continue;
      }
      if (choice[depth] >= static_cast<int>(branches[depth].size())) {
        choice[depth] = 0;
        --depth;
        if (depth >= 0) {
          if (branches[depth][choice[depth]].channel >= 0) jumps.pop_back();
          ++choice[depth];
        }
        continue;
      }
      const Branch& br = branches[depth][choice[depth]];
      if (br.channel >= 0 && max_jumps >= 0 &&
          static_cast<int>(jumps.size()) >= max_jumps) {
        ++choice[depth];
        continue;
      }
      if (br.channel >= 0) jumps.push_back({depth, br.channel, br.visible});
      stack[depth + 1] = br.op * stack[depth];
      ++depth;
    }
  }
  return out;
}

}  // namespace

DiscreteEnumeration enumerate_discrete(const TrajectoryContext& ctx, int bins,
                                       int max_jumps) {
  return enumerate_branches(ctx, bin_branches(bin_steps(ctx.model, ctx.tau, bins)), bins,
                            max_jumps);
}

DiscreteEnumeration enumerate_discrete_exact(const TrajectoryContext& ctx, int bins,
                                             int max_jumps) {
  return enumerate_branches(ctx, exact_bin_branches(ctx.model, ctx.tau, bins), bins,
                            max_jumps);
}

std::vector<DiscreteVisibleKey> all_visible_keys(const DiscreteEnumeration& enumeration) {
  std::set<DiscreteVisibleKey> keys;
  for (const auto& rec : enumeration.records) keys.insert(visible_key(rec));
  return {keys.begin(), keys.end()};
}

std::vector<const DiscreteRecord*> matching_records(const DiscreteEnumeration& enumeration,
                                                    const DiscreteVisibleKey& key,
                                                    bool match_final) {
  std::vector<const DiscreteRecord*> out;
  for (const auto& rec : enumeration.records) {
    DiscreteVisibleKey k = visible_key(rec);
    if (!match_final) k.final_outcome = key.final_outcome;
    if (k == key) out.push_back(&rec);
  }
  return out;
}

double discrete_visible_log_weight(const TrajectoryContext& ctx, int bins,
                                   const DiscreteVisibleKey& key) {
  const Model& model = ctx.model;
  const auto steps = bin_steps(model, ctx.tau, bins);
  double pn = ctx.initial.probabilities[key.initial_outcome];
  if (!(pn > 0)) return kNegInf;

  Matrix x = ctx.initial.projector(key.initial_outcome);
  double log_scale = std::log(pn);
  std::size_t next = 0;
  for (int b = 0; b < bins; ++b) {
    if (next < key.jumps.size() && key.jumps[next].first == b) {
      int k = key.jumps[next].second;
      const Matrix* op = nullptr;
      for (const auto& [kk, o] : steps[b].visible)
        if (kk == k) op = &o;
      if (op == nullptr)
        throw RecordError("visible jump on unmonitored channel in discrete key");
      x = (*op) * x * op->adjoint();
      ++next;
    } else {
      Matrix y = steps[b].no_jump * x * steps[b].no_jump.adjoint();
      for (const auto& [kk, o] : steps[b].hidden) y += o * x * o.adjoint();
      x = std::move(y);
    }
    double tr = x.trace().real();
    if (!(tr > 0)) return kNegInf;
    log_scale += std::log(tr);
    x /= tr;
  }
  if (next != key.jumps.size()) throw RecordError("discrete key bin out of range");
  Complex w = ctx.final_basis.vector(key.final_outcome).adjoint() * x *
              ctx.final_basis.vector(key.final_outcome);
  if (!(w.real() > 0)) return kNegInf;
  return log_scale + std::log(w.real());
}

DiscreteVisibleKey reverse_key(const DiscreteVisibleKey& key, const Model& model, int bins) {
  DiscreteVisibleKey rev;
  rev.initial_outcome = key.final_outcome;
  rev.final_outcome = key.initial_outcome;
  for (const auto& [bin, channel] : key.jumps)
    rev.jumps.emplace_back(bins - 1 - bin, model.channels[channel].reverse_index);
  std::sort(rev.jumps.begin(), rev.jumps.end());
  return rev;
}

double discrete_visible_log_weight_reversed(const TrajectoryContext& ctx, int bins,
                                            const DiscreteVisibleKey& key) {
  TrajectoryContext rev = reverse_context(ctx);
  return discrete_visible_log_weight(rev, bins, reverse_key(key, ctx.model, bins));
}

OracleConditional oracle_conditional(const DiscreteEnumeration& enumeration,
                                     const TrajectoryContext& ctx,
                                     const DiscreteVisibleKey& key) {
  OracleConditional out;
  double weighted = 0;
  for (const DiscreteRecord* rec : matching_records(enumeration, key)) {
    if (!(rec->probability > 0)) continue;
    out.p_visible += rec->probability;
    weighted += rec->probability * std::exp(-rec->s_tot);
  }
  if (out.p_visible > 0) out.exp_neg_s = weighted / out.p_visible;
  double fwd = discrete_visible_log_weight(ctx, enumeration.bins, key);
  double rev = discrete_visible_log_weight_reversed(ctx, enumeration.bins, key);
  out.sigma = fwd - rev;
  out.p_visible_chain = std::exp(fwd);
  out.p_visible_reversed = std::exp(rev);
  return out;
}

FullRecord to_full_record(const DiscreteRecord& rec, const DiscreteEnumeration& enumeration,
                          double duration) {
  FullRecord full;
  full.initial_outcome = rec.initial_outcome;
  full.final_outcome = rec.final_outcome;
  full.duration = duration;
  for (const auto& j : rec.jumps)
    full.jumps.push_back({(j.bin + 0.5) * enumeration.dt, j.channel});
  return full;
}

VisibleRecord to_visible_record(const DiscreteVisibleKey& key,
                                const DiscreteEnumeration& enumeration, double duration) {
  VisibleRecord rec;
  rec.initial_outcome = key.initial_outcome;
  rec.final_outcome = key.final_outcome;
  rec.duration = duration;
  for (const auto& [bin, channel] : key.jumps)
    rec.jumps.push_back({(bin + 0.5) * enumeration.dt, channel});
  return rec;
}

void write_oracle_csv(std::ostream& os, const DiscreteEnumeration& enumeration,
                      const TrajectoryContext& ctx, double time_scale) {
  os << "record,visible,probability,s_tot";
  for (const auto& [r, beta] : ctx.model.beta) os << ",heat_" << r;
  os << "\n";
  for (const auto& rec : enumeration.records) {
    FullRecord full = to_full_record(rec, enumeration, ctx.tau);
    VisibleRecord vis = to_visible_record(visible_key(rec), enumeration, ctx.tau);
    os << '"' << format_record(full, time_scale) << '"' << ',' << '"'
       << format_record(vis, time_scale) << '"' << ',' << fmt(rec.probability) << ','
       << fmt(rec.probability > 0 ? rec.s_tot : 0.0);
    for (const auto& [r, beta] : ctx.model.beta) {
      auto it = rec.heat.find(r);
      os << ',' << fmt(it == rec.heat.end() ? 0.0 : it->second);
    }
    os << "\n";
  }
}

}  // namespace qjt
