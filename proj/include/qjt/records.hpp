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

#include <string>
#include <vector>

#include "qjt/model.hpp"

namespace qjt {

// One detected or undetected quantum jump.
struct JumpEvent {
  double time;
  int channel;
};

// Complete measurement record: initial projective outcome, every jump, final
// projective outcome, over a horizon `duration`.
struct FullRecord {
  int initial_outcome = 0;
  std::vector<JumpEvent> jumps;
  int final_outcome = 0;
  double duration = 0;
};

// The part of a record an imperfect detector sees. Same shape as FullRecord,
// but kept as a distinct type: quantities defined on visible records (the
// irreversibility estimator, conditional averages) must not silently accept
// full records.
struct VisibleRecord {
  int initial_outcome = 0;
  std::vector<JumpEvent> jumps;
  int final_outcome = 0;
  double duration = 0;
};

// The jumps the detector missed.
struct HiddenRecord {
  std::vector<JumpEvent> jumps;
};

// Throws RecordError unless jump times are strictly increasing within
// [0, duration] and channels index into `channel_count`.
void validate_record_shape(const std::vector<JumpEvent>& jumps, double duration,
                           int channel_count);

// Interleave visible and hidden jumps by time (strictly increasing overall).
FullRecord merge_records(const VisibleRecord& visible, const HiddenRecord& hidden);

// Time-reverse a record: jump at t of channel k becomes a jump at
// duration - t of k's detailed-balance partner; outcomes are swapped. The
// result is a record of the time-reversed process.
FullRecord reverse_record(const FullRecord& rec, const Model& model);
VisibleRecord reverse_record(const VisibleRecord& rec, const Model& model);

// Text form "n | t1:k1 t2:k2 ... | m | tau" with times multiplied by
// `time_scale` (so a rate unit like gamma0 yields dimensionless times) and
// printed to 12 significant digits. The jump list field is empty for
// jump-free records.
std::string format_record(const FullRecord& rec, double time_scale);
std::string format_record(const VisibleRecord& rec, double time_scale);
FullRecord parse_full_record(const std::string& line, double time_scale);
VisibleRecord parse_visible_record(const std::string& line, double time_scale);

inline VisibleRecord as_visible(const FullRecord& rec) {
  return VisibleRecord{rec.initial_outcome, rec.jumps, rec.final_outcome, rec.duration};
}

}  // namespace qjt
