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

#include <vector>

#include "qjt/context.hpp"
#include "qjt/records.hpp"

namespace qjt {

// Normalized conditional (filtered) state along one inter-jump leg of a
// visible record, sampled on a uniform grid with an odd number of points so
// each leg is ready for composite Simpson integration.
struct StatePathInterval {
  double t_begin = 0;
  double t_end = 0;
  std::vector<double> times;
  std::vector<Matrix> states;  // Hermitian, trace one
};

struct ConditionalStatePath {
  std::vector<StatePathInterval> intervals;
  RealVector final_outcome_probabilities;  // P[m | visible record, n]

  const Matrix& final_state() const { return intervals.back().states.back(); }

  // Composite Simpson integral of t -> weight(t, state_t) over all legs.
  template <class F>
  double integrate(F&& weight) const {
    double total = 0;
    for (const auto& leg : intervals) {
      const std::size_t p = leg.times.size();
      if (p < 3) continue;
      double h = (leg.t_end - leg.t_begin) / static_cast<double>(p - 1);
      double acc = weight(leg.times.front(), leg.states.front()) +
                   weight(leg.times.back(), leg.states.back());
      for (std::size_t i = 1; i + 1 < p; ++i)
        acc += (i % 2 == 1 ? 4.0 : 2.0) * weight(leg.times[i], leg.states[i]);
      total += acc * h / 3.0;
    }
    return total;
  }
};

// Evolve the filtered state of an observer who saw exactly the visible jumps
// of `rec`: no-visible-jump propagation between detected jumps, renormalized
// visible jump updates at detection times. The state starts in the initial
// projector of outcome n and is renormalized at every grid point. Throws
// RecordError when a detected jump has zero probability at its time.
ConditionalStatePath evolve_conditional_state(const VisibleRecord& rec,
                                              const TrajectoryContext& ctx,
                                              int points_per_interval = 65);

}  // namespace qjt
