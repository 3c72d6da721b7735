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

#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "qjt/context.hpp"
#include "qjt/records.hpp"

namespace qjt {

// Exhaustive enumeration of a time-binned measurement model: the horizon is
// cut into `bins` steps and each step applies either the first-order no-jump
// operator or exactly one (monitored or unmonitored) jump branch. Everything
// downstream of this model is exact arithmetic, so it serves as an
// independent oracle for the continuous-time estimators on short horizons.

struct DiscreteJump {
  int bin = 0;
  int channel = 0;
  bool visible = false;
};

struct DiscreteRecord {
  int initial_outcome = 0;
  int final_outcome = 0;
  std::vector<DiscreteJump> jumps;  // ordered by bin
  double probability = 0;           // includes boundary and branch weights
  double s_tot = 0;                 // total entropy production
  std::map<int, double> heat;       // reservoir -> heat delivered to it
};

// What a detector with the model's efficiencies sees of a discrete record.
struct DiscreteVisibleKey {
  int initial_outcome = 0;
  int final_outcome = 0;
  std::vector<std::pair<int, int>> jumps;  // (bin, channel), ordered by bin

  bool operator<(const DiscreteVisibleKey& o) const;
  bool operator==(const DiscreteVisibleKey& o) const;
};

DiscreteVisibleKey visible_key(const DiscreteRecord& rec);

struct DiscreteEnumeration {
  int bins = 0;
  double dt = 0;
  std::vector<DiscreteRecord> records;
  double total_mass = 0;  // sum of enumerated record probabilities
  double model_mass = 0;  // exact mass of the discrete model (superoperator product)
};

// Enumerate every discrete record (optionally only those with at most
// `max_jumps` jumps; -1 enumerates all). Branch operators are evaluated at
// bin midpoints. Throws when the pattern count exceeds ~2e7.
DiscreteEnumeration enumerate_discrete(const TrajectoryContext& ctx, int bins,
                                       int max_jumps = -1);

// Variant with exact within-bin propagators: the no-jump branch is the exact
// no-jump evolution over the bin and jump branches sandwich sqrt(eta dt) L
// between the exact half-bin propagators. Each record's probability equals
// the continuous path density times dt^J (with the detection factors eta or
// 1 - eta per jump) to rounding, at any bin width; the discrete model is not
// trace-preserving, so compare masses against model_mass.
DiscreteEnumeration enumerate_discrete_exact(const TrajectoryContext& ctx, int bins,
                                             int max_jumps = -1);

// All distinct visible keys of an enumeration, sorted.
std::vector<DiscreteVisibleKey> all_visible_keys(const DiscreteEnumeration& enumeration);

// Records whose visible part matches the key; when match_final is false the
// final outcome is ignored.
std::vector<const DiscreteRecord*> matching_records(const DiscreteEnumeration& enumeration,
                                                    const DiscreteVisibleKey& key,
                                                    bool match_final = true);

// Log probability of a visible key under the discrete model, with the
// unmonitored branches summed out exactly by a density-matrix chain.
double discrete_visible_log_weight(const TrajectoryContext& ctx, int bins,
                                   const DiscreteVisibleKey& key);

// The mirrored key (reflected bins, partner channels, swapped outcomes).
DiscreteVisibleKey reverse_key(const DiscreteVisibleKey& key, const Model& model, int bins);

// The mirrored key evaluated under the time-reversed discrete model.
double discrete_visible_log_weight_reversed(const TrajectoryContext& ctx, int bins,
                                            const DiscreteVisibleKey& key);

struct OracleConditional {
  double p_visible = 0;           // summed over matching records
  double exp_neg_s = 0;           // conditional average of e^{-S_tot}
  double sigma = 0;               // visible irreversibility, fwd minus reversed
  double p_visible_chain = 0;     // density-matrix chain cross-check
  double p_visible_reversed = 0;  // reversed chain for the mirrored key
};
OracleConditional oracle_conditional(const DiscreteEnumeration& enumeration,
                                     const TrajectoryContext& ctx,
                                     const DiscreteVisibleKey& key);

// Continuous-record views of discrete data, with jumps at bin midpoints.
FullRecord to_full_record(const DiscreteRecord& rec, const DiscreteEnumeration& enumeration,
                          double duration);
VisibleRecord to_visible_record(const DiscreteVisibleKey& key,
                                const DiscreteEnumeration& enumeration, double duration);

// CSV dump of the enumeration: serialized record, probability, entropy
// production, per-reservoir heat, and the visible record it coarse-grains
// to. Times are written in units of 1/time_scale.
void write_oracle_csv(std::ostream& os, const DiscreteEnumeration& enumeration,
                      const TrajectoryContext& ctx, double time_scale = 1.0);

}  // namespace qjt
