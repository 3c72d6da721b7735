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

#include "qjt/context.hpp"
#include "qjt/records.hpp"

namespace qjt {

// Log probability density of a full record under the forward process:
// p_n(0) |<m| U(tau,t_J) L_{k_J} ... L_{k_1} U(t_1,0) |n>|^2, a density in
// the jump times (one factor of rate per jump). Returns -infinity for
// zero-probability records; throws RecordError for records inconsistent with
// the context.
double log_path_probability_full(const FullRecord& rec, const TrajectoryContext& ctx);

// Same record evaluated under the time-reversed process: the reversed record
// (mirrored times, partner channels, swapped outcomes) in the reversed
// context, whose initial distribution is the forward final one.
double log_path_probability_full_reversed(const FullRecord& rec,
                                          const TrajectoryContext& ctx);

// Log probability density of a visible record: hidden jumps summed out via
// the no-visible-jump propagator between detected jumps,
// p_n(0) Tr[Pi_m N(tau,t_V) J_{k_V} ... J_{k_1} N(t_1,0) (Pi_n)].
double log_path_probability_visible(const VisibleRecord& rec, const TrajectoryContext& ctx);

// Visible record under the time-reversed process (detection efficiencies
// exchanged within detailed-balance pairs).
double log_path_probability_visible_reversed(const VisibleRecord& rec,
                                             const TrajectoryContext& ctx);

// Visible weight with the final projector replaced by a trace: the joint
// density of (initial outcome, visible jumps) regardless of the final
// outcome. Used for final-outcome conditionals and initial-state posteriors.
double log_visible_weight_final_summed(const VisibleRecord& rec,
                                       const TrajectoryContext& ctx);

}  // namespace qjt
