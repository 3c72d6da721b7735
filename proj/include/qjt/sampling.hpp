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
#include <vector>

#include "qjt/context.hpp"
#include "qjt/records.hpp"
#include "qjt/rng.hpp"

namespace qjt {

// One trajectory of the perfectly monitored process: sample the initial
// outcome, evolve the pure state with the no-jump propagator until its
// squared norm reaches a uniform target (jump time located by bisection),
// draw the jump channel proportionally to <psi| L_k^dagger L_k |psi>, apply
// the jump, repeat to the horizon, then sample the final outcome from the
// Born probabilities.
FullRecord sample_ideal_trajectory(const TrajectoryContext& ctx, RngStream& rng);

// Split a full record into detected and missed jumps: each jump of channel k
// is visible with probability eta_k, independently.
std::pair<VisibleRecord, HiddenRecord> coarse_grain(const FullRecord& rec, const Model& model,
                                                    RngStream& rng);

// Ensemble of trajectories; trajectory i uses stream (seed, i). The parallel
// version distributes trajectories across OpenMP threads and is bitwise
// identical to the serial reference for any worker count.
std::vector<FullRecord> sample_ensemble(const TrajectoryContext& ctx, int count,
                                        std::uint64_t seed);
std::vector<FullRecord> sample_ensemble_serial(const TrajectoryContext& ctx, int count,
                                               std::uint64_t seed);

}  // namespace qjt
