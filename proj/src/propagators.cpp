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

#include "qjt/propagators.hpp"

#include <cmath>

#include "qjt/engine.hpp"

namespace qjt {

Matrix lindblad_propagate(const Model& model, const Matrix& rho, double t0, double t1) {
  if (rho.rows() != model.dim || rho.cols() != model.dim)
    throw ModelError("lindblad_propagate: state dimension mismatch");
  if (!is_hermitian(rho, 1e-10)) throw ModelError("lindblad_propagate: state not Hermitian");
  Engine eng(model);
  Matrix out = unvectorize(eng.lindblad_apply(t0, t1, vectorize(rho)), model.dim);
  out = 0.5 * (out + out.adjoint());
  double tr_err = std::abs(out.trace() - rho.trace());
  if (tr_err > 1e-10) throw ModelError("lindblad_propagate: trace drift exceeds tolerance");
  if (min_eigenvalue(out) < -1e-10)
    throw ModelError("lindblad_propagate: output lost positivity");
  return out;
}

Matrix steady_state(const Model& model) {
  Engine eng(model);
  const int d = model.dim;
  for (size_t s = 1; s < model.protocol.segments.size(); ++s)
    if ((model.protocol.segments[s].hamiltonian - model.protocol.segments[0].hamiltonian)
            .cwiseAbs()
            .maxCoeff() > 1e-12)
      throw SteadyStateError("steady state: protocol is time-dependent");
  const Matrix& gen = eng.lindblad_generator(0);
  // Uniqueness: the null space of the generator must be one-dimensional.
  Eigen::JacobiSVD<Matrix> svd(gen, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double scale = std::max(sv(0), 1e-300);
  int null_dim = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= 1e-10 * scale) ++null_dim;
  if (null_dim == 0) throw SteadyStateError("steady state: generator has no null vector");
  if (null_dim > 1)
    throw SteadyStateError("steady state: degenerate null space (dimension " +
                           std::to_string(null_dim) + ")");
  Matrix rho = unvectorize(svd.matrixV().col(sv.size() - 1), d);
  rho = 0.5 * (rho + rho.adjoint());
  Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12)
    throw SteadyStateError("steady state: null vector is traceless");
  rho /= tr;
  if (min_eigenvalue(rho) < -1e-10)
    throw SteadyStateError("steady state: fixed point is not positive semidefinite");
  double resid = unvectorize(gen * vectorize(rho), d).cwiseAbs().maxCoeff();
  if (resid > 1e-10)
    throw SteadyStateError("steady state: fixed-point residual exceeds tolerance");
  return rho;
}

Matrix no_jump_propagator(const Model& model, double t0, double t1) {
  return Engine(model).no_jump_matrix(t0, t1);
}

Matrix hidden_propagator(const Model& model, double t0, double t1) {
  return Engine(model).hidden_matrix(t0, t1);
}

Matrix jump_superoperator(const Model& model, int channel) {
  if (channel < 0 || channel >= static_cast<int>(model.channels.size()))
    throw ModelError("jump_superoperator: channel out of range");
  const auto& c = model.channels[channel];
  return c.efficiency * kron(c.op.conjugate(), c.op);
}

ReversedGeneratorParts reversed_generator_parts(const Model& model) {
  ReversedGeneratorParts parts;
  parts.reversed = reverse_model(model);
  Engine eng(parts.reversed);
  for (int s = 0; s < eng.segment_count(); ++s)
    parts.hidden_generators.push_back(eng.hidden_generator(s));
  for (size_t k = 0; k < parts.reversed.channels.size(); ++k)
    parts.jump_superoperators.push_back(
        jump_superoperator(parts.reversed, static_cast<int>(k)));
  return parts;
}

KrausStep kraus_step(const Model& model, double t, double dt) {
  if (dt <= 0) throw ModelError("kraus_step: dt must be positive");
  const int d = model.dim;
  int seg = model.protocol.segment_at(t);
  const Matrix& h = model.protocol.segments[seg].hamiltonian;
  Matrix a = Matrix::Zero(d, d);
  for (const auto& c : model.channels) a += c.op.adjoint() * c.op;

  KrausStep step;
  step.dt = dt;
  step.no_jump = Matrix::Identity(d, d) - Complex(0, 1) * h * dt - 0.5 * dt * a;
  Matrix total = step.no_jump.adjoint() * step.no_jump;
  for (size_t k = 0; k < model.channels.size(); ++k) {
    const auto& c = model.channels[k];
    if (c.efficiency > 0)
      step.visible.emplace_back(static_cast<int>(k), std::sqrt(c.efficiency * dt) * c.op);
    if (c.efficiency < 1)
      step.hidden.emplace_back(static_cast<int>(k),
                               std::sqrt((1.0 - c.efficiency) * dt) * c.op);
    total += dt * c.op.adjoint() * c.op;
  }
  step.completeness_residual = (total - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  return step;
}

}  // namespace qjt
