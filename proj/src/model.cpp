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

#include "qjt/model.hpp"

#include <cmath>
#include <sstream>

namespace qjt {

namespace {

constexpr double kPairTol = 1e-12;

std::string channel_tag(int k) {
  std::ostringstream os;
  os << "channel " << k;
  return os.str();
}

}  // namespace

int Protocol::segment_at(double t) const {
  if (segments.empty()) throw RecordError("protocol has no segments");
  double start = 0;
  for (size_t i = 0; i < segments.size(); ++i) {
    double end = start + segments[i].duration;
    if (t < end || i + 1 == segments.size()) {
      if (t < start - 1e-12 || t > end + 1e-12)
        throw RecordError("time outside protocol");
      return static_cast<int>(i);
    }
    start = end;
  }
  return static_cast<int>(segments.size()) - 1;
}

double Protocol::segment_start(int idx) const {
  double start = 0;
  for (int i = 0; i < idx; ++i) start += segments[i].duration;
  return start;
}

Matrix dissipator(const Matrix& op, const Matrix& rho) {
  if (op.rows() != rho.rows() || op.cols() != rho.cols() || rho.rows() != rho.cols())
    throw ModelError("dissipator: dimension mismatch");
  Matrix n = op.adjoint() * op;
  return op * rho * op.adjoint() - 0.5 * anticommutator(n, rho);
}

std::vector<std::string> validate_model(const Model& model) {
  std::vector<std::string> v;
  const int d = model.dim;
  if (d <= 0) {
    v.push_back("dimension must be positive");
    return v;
  }
  if (model.protocol.segments.empty()) v.push_back("protocol is empty");
  for (size_t i = 0; i < model.protocol.segments.size(); ++i) {
    const auto& s = model.protocol.segments[i];
    std::ostringstream os;
    os << "protocol segment " << i;
    if (s.duration <= 0) v.push_back(os.str() + ": duration must be positive");
    if (s.hamiltonian.rows() != d || s.hamiltonian.cols() != d)
      v.push_back(os.str() + ": Hamiltonian dimension mismatch");
    else if (!all_finite(s.hamiltonian))
      v.push_back(os.str() + ": Hamiltonian has non-finite entries");
    else if (!is_hermitian(s.hamiltonian, 1e-12))
      v.push_back(os.str() + ": Hamiltonian is not Hermitian");
  }
  if (model.reversal_basis.size() != 0) {
    if (model.reversal_basis.rows() != d || model.reversal_basis.cols() != d)
      v.push_back("reversal basis dimension mismatch");
    else if ((model.reversal_basis.adjoint() * model.reversal_basis - Matrix::Identity(d, d))
                 .cwiseAbs()
                 .maxCoeff() > 1e-10)
      v.push_back("reversal basis is not unitary");
  }
  const int nk = static_cast<int>(model.channels.size());
  for (int k = 0; k < nk; ++k) {
    const auto& c = model.channels[k];
    if (c.op.rows() != d || c.op.cols() != d) {
      v.push_back(channel_tag(k) + ": operator dimension mismatch");
      continue;
    }
    if (!all_finite(c.op)) v.push_back(channel_tag(k) + ": operator has non-finite entries");
    if (!(c.efficiency >= 0.0 && c.efficiency <= 1.0))
      v.push_back(channel_tag(k) + ": efficiency outside [0, 1]");
    if (!model.beta.count(c.reservoir))
      v.push_back(channel_tag(k) + ": reservoir has no inverse temperature");
    else if (model.beta.at(c.reservoir) <= 0)
      v.push_back(channel_tag(k) + ": reservoir inverse temperature must be positive");
    if (c.reverse_index < 0 || c.reverse_index >= nk) {
      v.push_back(channel_tag(k) + ": reverse partner index out of range");
      continue;
    }
    const auto& r = model.channels[c.reverse_index];
    if (r.reverse_index != k)
      v.push_back(channel_tag(k) + ": reverse pairing is not an involution");
    if (c.reverse_index == k) {
      if (std::abs(c.entropy_flux) > kPairTol)
        v.push_back(channel_tag(k) + ": self-paired channel must have zero entropy flux");
      if (!is_hermitian(c.op, kPairTol))
        v.push_back(channel_tag(k) + ": self-paired channel operator must be Hermitian");
    } else if (r.op.rows() == d && r.op.cols() == d) {
      // L_partner = L^dagger exp(-Delta s / 2), and opposite flux.
      double mismatch =
          (r.op - c.op.adjoint() * std::exp(-0.5 * c.entropy_flux)).cwiseAbs().maxCoeff();
      if (mismatch > kPairTol) {
        std::ostringstream os;
        os << channel_tag(k) << ": detailed-balance pairing violated (|diff| = " << mismatch
           << ")";
        v.push_back(os.str());
      }
      if (std::abs(r.entropy_flux + c.entropy_flux) > kPairTol)
        v.push_back(channel_tag(k) + ": partner entropy flux is not opposite");
      if (r.reservoir != c.reservoir)
        v.push_back(channel_tag(k) + ": partner attached to a different reservoir");
    }
  }
  return v;
}

Matrix time_reverse_matrix(const Matrix& a, const Matrix& reversal_basis) {
  if (reversal_basis.size() == 0) return a.conjugate();
  const Matrix& u = reversal_basis;
  return u * (u.adjoint() * a * u).conjugate() * u.adjoint();
}

Matrix time_reverse_matrix(const Model& model, const Matrix& a) {
  return time_reverse_matrix(a, model.reversal_basis);
}

Model reverse_model(const Model& model) {
  Model rev;
  rev.dim = model.dim;
  rev.beta = model.beta;
  rev.reversal_basis = model.reversal_basis;
  // Mirror the drive in time and conjugate each segment by Theta.
  for (auto it = model.protocol.segments.rbegin(); it != model.protocol.segments.rend(); ++it)
    rev.protocol.segments.push_back(
        {it->duration, time_reverse_matrix(model, it->hamiltonian)});
  // Keep the channel layout; conjugate operators and exchange the detection
  // efficiencies within each detailed-balance pair. Entropy fluxes are
  // unchanged: the reversed channel k still transfers Delta s_k per jump.
  rev.channels.reserve(model.channels.size());
  for (const auto& c : model.channels) {
    Channel rc = c;
    rc.op = time_reverse_matrix(model, c.op);
    rc.efficiency = model.channels[c.reverse_index].efficiency;
    rev.channels.push_back(std::move(rc));
  }
  return rev;
}

double thermal_occupation(double beta, double omega) {
  if (beta <= 0 || omega <= 0)
    throw ModelError("thermal occupation needs beta > 0 and omega > 0");
  return 1.0 / std::expm1(beta * omega);
}

Model build_two_level_model(const TwoLevelParams& p) {
  if (p.gamma0 < 0) throw ModelError("two-level model: gamma0 must be nonnegative");
  if (p.tau <= 0) throw ModelError("two-level model: tau must be positive");
  if (!(p.eta_minus >= 0 && p.eta_minus <= 1 && p.eta_plus >= 0 && p.eta_plus <= 1))
    throw ModelError("two-level model: efficiencies must lie in [0, 1]");
  const double nbar = thermal_occupation(p.beta, p.omega);

  Matrix sm(2, 2), sp(2, 2), sx(2, 2);
  sm << 0, 1, 0, 0;  // |0><1|, basis order {ground, excited}
  sp << 0, 0, 1, 0;  // |1><0|
  sx << 0, 1, 1, 0;

  Model m;
  m.dim = 2;
  m.protocol.segments.push_back({p.tau, p.epsilon * sx});
  m.beta = {{0, p.beta}};
  m.reversal_basis = Matrix();  // plain conjugation in the energy basis

  Channel em;
  em.op = std::sqrt(p.gamma0 * (nbar + 1.0)) * sm;
  em.entropy_flux = p.beta * p.omega;
  em.efficiency = p.eta_minus;
  em.reservoir = 0;
  em.reverse_index = kAbsorption;

  Channel ab;
  ab.op = std::sqrt(p.gamma0 * nbar) * sp;
  ab.entropy_flux = -p.beta * p.omega;
  ab.efficiency = p.eta_plus;
  ab.reservoir = 0;
  ab.reverse_index = kEmission;

  m.channels = {em, ab};
  auto violations = validate_model(m);
  if (!violations.empty()) throw ModelError("two-level model: " + violations.front());
  return m;
}

}  // namespace qjt
