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

#include <stdexcept>
#include <string>

namespace qjt {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A model failed structural validation (dimensions, pairing, efficiencies, ...).
struct ModelError : Error {
  using Error::Error;
};

// A time interval fell outside the protocol, or a record is inconsistent with
// its context (duration mismatch, non-increasing jump times, ...).
struct RecordError : Error {
  using Error::Error;
};

// A requested quantity diverges (zero path probability, zero endpoint
// probability). Carries the offending record in serialized form.
struct DivergenceError : Error {
  DivergenceError(const std::string& what, std::string record_text)
      : Error(what + " [record: " + record_text + "]"), record(std::move(record_text)) {}
  std::string record;
};

// The steady state is not unique (degenerate generator null space) or could
// not be computed to tolerance.
struct SteadyStateError : Error {
  using Error::Error;
};

// A rejection sampler exhausted its attempt budget.
struct AttemptBudgetError : Error {
  using Error::Error;
};

// Configuration file problems: unknown keys, missing keys, bad values.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qjt
