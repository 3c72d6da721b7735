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

#include <map>
#include <string>
#include <vector>

#include "qjt/complex_linalg.hpp"
#include "qjt/errors.hpp"

namespace qjt {

// One decay channel of the open system. Channels come in detailed-balance
// pairs: the partner channel `reverse_index` satisfies
//     L_partner = L^dagger * exp(-entropy_flux / 2),
// and carries the opposite entropy flux. A self-paired channel must be
// Hermitian with zero entropy flux.
struct Channel {
  Matrix op;            // jump operator L
  double entropy_flux;  // entropy delivered to the reservoir per jump (Delta s)
  double efficiency;    // detector efficiency eta in [0, 1]
  int reservoir;        // reservoir label (key into Model::beta)
  int reverse_index;    // index of the detailed-balance partner channel
};

// Piecewise-constant drive protocol. The total duration defines the
// trajectory horizon tau.
struct ProtocolSegment {
  double duration;
  Matrix hamiltonian;  // Hermitian, in the same units as 1/time
};

struct Protocol {
  std::vector<ProtocolSegment> segments;

  double duration() const {
    double t = 0;
    for (const auto& s : segments) t += s.duration;
    return t;
  }
  // Index of the segment containing time t (boundaries belong to the later
  // segment, except t == duration which belongs to the last).
  int segment_at(double t) const;
  double segment_start(int idx) const;
};

// Full open-system model: drive protocol, jump channels, reservoir inverse
// temperatures, and the antiunitary reversal convention. The reversal acts as
// Theta X Theta^dagger = U conj(U^dagger X U) U^dagger with U = reversal_basis
// (identity = plain complex conjugation in the computational basis).
struct Model {
  int dim = 0;
  Protocol protocol;
  std::vector<Channel> channels;
  std::map<int, double> beta;  // reservoir -> inverse temperature
  Matrix reversal_basis;       // unitary U defining Theta; empty means identity

  double duration() const { return protocol.duration(); }
};

// Lindblad dissipator D[L](rho) = L rho L^dagger - 1/2 {L^dagger L, rho}.
Matrix dissipator(const Matrix& op, const Matrix& rho);

// Structural validation; returns human-readable violations (empty == valid).
std::vector<std::string> validate_model(const Model& model);

// Apply the antiunitary reversal to a matrix: Theta A Theta^dagger.
Matrix time_reverse_matrix(const Matrix& a, const Matrix& reversal_basis);
Matrix time_reverse_matrix(const Model& model, const Matrix& a);

// Build the time-reversed model: protocol segments mirrored in time with
// reversed Hamiltonians, channel operators conjugated by Theta, and detection
// efficiencies exchanged within each detailed-balance pair (a reversed jump
// of channel k is detected with the efficiency of k's partner).
Model reverse_model(const Model& model);

// Thermal two-level emitter, resonantly driven in the rotating frame:
// H = epsilon sigma_x, emission L = sqrt(gamma0 (nbar+1)) sigma_-,
// absorption L = sqrt(gamma0 nbar) sigma_+, nbar = 1/(exp(beta*omega)-1).
// Emission carries entropy flux +beta*omega, absorption -beta*omega; this is
// fixed by the pairing L_abs = L_em^dagger exp(-beta*omega/2), which follows
// from nbar + 1 = nbar exp(beta*omega).
struct TwoLevelParams {
  double omega = 1.0;        // bare transition frequency (energy unit)
  double gamma0 = 1e-3;      // vacuum decay rate
  double epsilon = 1e-2;     // drive amplitude
  double beta = 0.2;         // reservoir inverse temperature (beta*omega = 0.2)
  double eta_minus = 1.0;    // detection efficiency, emission channel
  double eta_plus = 1.0;     // detection efficiency, absorption channel
  double tau = 1e3;          // protocol duration
};

// Channel indices of the two-level model.
inline constexpr int kEmission = 0;
inline constexpr int kAbsorption = 1;

Model build_two_level_model(const TwoLevelParams& p);

double thermal_occupation(double beta, double omega);

}  // namespace qjt
