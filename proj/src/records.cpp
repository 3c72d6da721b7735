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

#include "qjt/records.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace qjt {

namespace {

std::string format_events(int n, const std::vector<JumpEvent>& jumps, int m, double duration,
                          double time_scale) {
  std::ostringstream os;
  os << n << " |";
  char buf[64];
  for (const auto& j : jumps) {
    std::snprintf(buf, sizeof(buf), " %.12g:%d", j.time * time_scale, j.channel);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), " | %d | %.12g", m, duration * time_scale);
  os << buf;
  return os.str();
}

struct ParsedLine {
  int n, m;
  std::vector<JumpEvent> jumps;
  double duration;
};

ParsedLine parse_line(const std::string& line, double time_scale) {
  if (time_scale <= 0) throw RecordError("record time scale must be positive");
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == '|') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  if (fields.size() != 4) throw RecordError("record line must have 4 '|'-separated fields");

  ParsedLine out;
  try {
    out.n = std::stoi(fields[0]);
    out.m = std::stoi(fields[2]);
    out.duration = std::stod(fields[3]) / time_scale;
    std::istringstream ev(fields[1]);
    std::string tok;
    while (ev >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos) throw RecordError("jump token missing ':'");
      JumpEvent j;
      j.time = std::stod(tok.substr(0, colon)) / time_scale;
      j.channel = std::stoi(tok.substr(colon + 1));
      out.jumps.push_back(j);
    }
  } catch (const std::invalid_argument&) {
    throw RecordError("malformed record line: " + line);
  } catch (const std::out_of_range&) {
    throw RecordError("malformed record line: " + line);
  }
  return out;
}

}  // namespace

void validate_record_shape(const std::vector<JumpEvent>& jumps, double duration,
                           int channel_count) {
  if (duration <= 0) throw RecordError("record duration must be positive");
  double prev = 0;
  bool first = true;
  for (const auto& j : jumps) {
    if (j.channel < 0 || j.channel >= channel_count)
      throw RecordError("jump channel out of range");
    if (j.time < 0 || j.time > duration) throw RecordError("jump time outside [0, duration]");
    if (!first && j.time <= prev) throw RecordError("jump times must be strictly increasing");
    prev = j.time;
    first = false;
  }
}

FullRecord merge_records(const VisibleRecord& visible, const HiddenRecord& hidden) {
  FullRecord out;
  out.initial_outcome = visible.initial_outcome;
  out.final_outcome = visible.final_outcome;
  out.duration = visible.duration;
  out.jumps.reserve(visible.jumps.size() + hidden.jumps.size());
  std::merge(visible.jumps.begin(), visible.jumps.end(), hidden.jumps.begin(),
             hidden.jumps.end(), std::back_inserter(out.jumps),
             [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
  for (size_t i = 1; i < out.jumps.size(); ++i)
    if (out.jumps[i].time <= out.jumps[i - 1].time)
      throw RecordError("merged record has coincident jump times");
  return out;
}

namespace {

std::vector<JumpEvent> reverse_events(const std::vector<JumpEvent>& jumps, double duration,
                                      const Model& model) {
  std::vector<JumpEvent> out;
  out.reserve(jumps.size());
  for (auto it = jumps.rbegin(); it != jumps.rend(); ++it) {
    if (it->channel < 0 || it->channel >= static_cast<int>(model.channels.size()))
      throw RecordError("jump channel out of range");
    out.push_back({duration - it->time, model.channels[it->channel].reverse_index});
  }
  return out;
}

}  // namespace

FullRecord reverse_record(const FullRecord& rec, const Model& model) {
  FullRecord out;
  out.initial_outcome = rec.final_outcome;
  out.final_outcome = rec.initial_outcome;
  out.duration = rec.duration;
  out.jumps = reverse_events(rec.jumps, rec.duration, model);
  return out;
}

VisibleRecord reverse_record(const VisibleRecord& rec, const Model& model) {
  VisibleRecord out;
  out.initial_outcome = rec.final_outcome;
  out.final_outcome = rec.initial_outcome;
  out.duration = rec.duration;
  out.jumps = reverse_events(rec.jumps, rec.duration, model);
  return out;
}

std::string format_record(const FullRecord& rec, double time_scale) {
  return format_events(rec.initial_outcome, rec.jumps, rec.final_outcome, rec.duration,
                       time_scale);
}

std::string format_record(const VisibleRecord& rec, double time_scale) {
  return format_events(rec.initial_outcome, rec.jumps, rec.final_outcome, rec.duration,
                       time_scale);
}

FullRecord parse_full_record(const std::string& line, double time_scale) {
  ParsedLine p = parse_line(line, time_scale);
  return FullRecord{p.n, std::move(p.jumps), p.m, p.duration};
}

VisibleRecord parse_visible_record(const std::string& line, double time_scale) {
  ParsedLine p = parse_line(line, time_scale);
  return VisibleRecord{p.n, std::move(p.jumps), p.m, p.duration};
}

}  // namespace qjt
