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

#include <memory>
#include <string>
#include <vector>

#include "qjt/complex_linalg.hpp"
#include "qjt/engine.hpp"
#include "qjt/model.hpp"

namespace qjt {

// Orthonormal projective measurement with outcome probabilities.
struct MeasurementBasis {
  Matrix vectors;              // columns are the basis vectors
  RealVector probabilities;    // Born probabilities of each outcome

  int size() const { return static_cast<int>(vectors.cols()); }
  Vector vector(int i) const { return vectors.col(i); }
  Matrix projector(int i) const { return vectors.col(i) * vectors.col(i).adjoint(); }
};

// Eigenbasis of a density matrix, ordered by descending eigenvalue with a
// deterministic tie-break (lexicographic on components) and a deterministic
// phase (largest-magnitude component made real positive).
MeasurementBasis eigenbasis_of(const Matrix& rho);

std::vector<std::string> validate_basis(const MeasurementBasis& basis);

// Everything needed to evaluate records of one monitored process: the model,
// the initial measurement (eigenbasis of rho_0), the final measurement
// (eigenbasis of rho_tau evolved under the unconditional master equation),
// and cached propagators for the forward and time-reversed models.
struct TrajectoryContext {
  Model model;
  MeasurementBasis initial;
  MeasurementBasis final_basis;
  double tau = 0;
  std::shared_ptr<const Engine> engine;
  std::shared_ptr<const Engine> reversed_engine;
};

TrajectoryContext make_context(const Model& model, const Matrix& rho0);

// Context whose initial state is the steady state of the model (the final
// basis then coincides with the initial one up to numerical drift).
TrajectoryContext make_steady_state_context(const Model& model);

// The time-reversed process as a context of its own: reversed model, initial
// measurement = Theta-conjugated final basis carrying the forward final
// probabilities, and vice versa. Engines are swapped, not rebuilt.
TrajectoryContext reverse_context(const TrajectoryContext& ctx);

// Apply the model's antiunitary reversal to each basis vector.
MeasurementBasis time_reverse_basis(const MeasurementBasis& basis, const Model& model);

}  // namespace qjt
