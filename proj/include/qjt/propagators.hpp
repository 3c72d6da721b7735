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

#include <utility>
#include <vector>

#include "qjt/complex_linalg.hpp"
#include "qjt/model.hpp"

namespace qjt {

// Propagate a density matrix under the unconditional master equation
// rho' = -i[H, rho] + sum_k D[L_k] rho from t0 to t1 (piecewise-constant H,
// exact matrix exponential per segment). Verifies trace/Hermiticity/positivity
// of the result.
Matrix lindblad_propagate(const Model& model, const Matrix& rho, double t0, double t1);

// Unique fixed point of the (time-independent) unconditional generator,
// computed from the null space of its column-stacked matrix. Throws
// SteadyStateError when the null space is degenerate or the fixed point fails
// positivity.
Matrix steady_state(const Model& model);

// No-jump propagator U(t1, t0) = T+ exp(-i int (H(t) - i/2 sum L^dagger L)).
Matrix no_jump_propagator(const Model& model, double t0, double t1);

// d^2 x d^2 propagator of the no-visible-jump (hidden) evolution: the
// unconditional generator with each channel feeding term weighted by
// (1 - efficiency). Trace-preserving at efficiency 0; pure no-jump
// conjugation at efficiency 1.
Matrix hidden_propagator(const Model& model, double t0, double t1);

// Visible jump superoperator J_k(sigma) = eta_k L_k sigma L_k^dagger as a
// column-stacked matrix.
Matrix jump_superoperator(const Model& model, int channel);

// Everything the time-reversed process needs, bundled: the reversed model,
// its per-segment hidden generators, and its visible jump superoperators
// (detection efficiencies exchanged within detailed-balance pairs).
struct ReversedGeneratorParts {
  Model reversed;
  std::vector<Matrix> hidden_generators;   // one per reversed protocol segment
  std::vector<Matrix> jump_superoperators;  // one per channel
};
ReversedGeneratorParts reversed_generator_parts(const Model& model);

// First-order measurement step over [t, t + dt]:
// M0 = 1 - i H(t) dt - dt/2 sum L^dagger L, visible branch sqrt(eta dt) L,
// hidden branch sqrt((1-eta) dt) L. Completeness holds to O(dt^2); the
// residual |sum M^dagger M - 1|_max is reported.
struct KrausStep {
  double dt;
  Matrix no_jump;
  std::vector<std::pair<int, Matrix>> visible;  // (channel, operator)
  std::vector<std::pair<int, Matrix>> hidden;
  double completeness_residual;
};
KrausStep kraus_step(const Model& model, double t, double dt);

}  // namespace qjt
