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

struct EstimateWithError {
  double mean = 0;
  double std_error = 0;
  std::size_t samples = 0;
};

// Sample mean with standard error of the mean.
EstimateWithError mean_with_error(const std::vector<double>& values);

// Mean of exp(x) over log-domain inputs, shifted by the maximum for
// stability. Entries of -infinity contribute zero.
EstimateWithError exp_mean_with_error(const std::vector<double>& log_values);

// How rejections are handled when sampling hidden jumps between detected
// ones. kChainedIntervals restarts only the leg that failed, keeping earlier
// legs; this resamples each leg from its local conditional and is exact
// whenever the record has at most one leg (no detected jumps), but slightly
// biased otherwise because later acceptance probabilities are correlated
// with earlier hidden jumps. kWholeRecord restarts the whole record on any
// rejection and is exact for every record at the cost of a lower acceptance
// rate.
enum class ConditionalMode { kChainedIntervals, kWholeRecord };

struct ConditionalSamplerOptions {
  ConditionalMode mode = ConditionalMode::kWholeRecord;
  // Attempt budget: per leg for kChainedIntervals, per record otherwise.
  long max_attempts = 1'000'000;
  // Keep the record's final outcome (accept by its Born weight). When false,
  // the final outcome is drawn fresh from the Born rule instead.
  bool fixed_final_outcome = true;
};

struct HiddenSample {
  HiddenRecord hidden;
  int final_outcome = -1;  // set when fixed_final_outcome is false
  bool completed = false;
  long attempts = 0;
};

// Draw hidden jumps distributed as P(hidden | visible record): rejection
// sampling whose proposal evolves a pure state with the full-damping no-jump
// propagator, fires hidden jumps at uniform squared-norm targets, aborts
// whenever a monitored jump fires where none was detected, and accepts each
// detected jump with probability <L^dagger L> / lambda_max(L^dagger L).
HiddenSample sample_hidden_given_visible(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                         RngStream& rng,
                                         const ConditionalSamplerOptions& options = {});

// Interleave a visible record with one hidden sample into a full record.
FullRecord compose_full_record(const VisibleRecord& rec, const HiddenSample& sample);

struct ConditionalBatch {
  std::vector<FullRecord> records;  // completed samples, in sample order
  long total_attempts = 0;
  int failed = 0;
};

// Batch of hidden samples; sample i uses stream (seed, i). The parallel
// version is bitwise identical to the serial reference.
ConditionalBatch sample_conditional_batch(const VisibleRecord& rec, const TrajectoryContext& ctx,
                                          int count, std::uint64_t seed,
                                          const ConditionalSamplerOptions& options = {});
ConditionalBatch sample_conditional_batch_serial(const VisibleRecord& rec,
                                                 const TrajectoryContext& ctx, int count,
                                                 std::uint64_t seed,
                                                 const ConditionalSamplerOptions& options = {});

}  // namespace qjt
