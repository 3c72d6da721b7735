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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qjt/model.hpp"
#include "qjt/propagators.hpp"

using namespace qjt;

namespace {

// Unconditional master-equation right-hand side, assembled independently of
// the library's superoperator plumbing.
Matrix lindblad_rhs(const Model& m, const Matrix& rho, double t) {
  int seg = m.protocol.segment_at(t);
  Matrix out = Complex(0, -1) * commutator(m.protocol.segments[seg].hamiltonian, rho);
  for (const auto& c : m.channels) out += dissipator(c.op, rho);
  return out;
}

Matrix ground_state() {
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 1;
  return g;
}

}  // namespace

TEST_CASE("steady state annihilates the generator and is a valid state") {
  TwoLevelParams p;  // driven: epsilon != 0
  Model m = build_two_level_model(p);
  Matrix rho = steady_state(m);

  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
  CHECK(is_hermitian(rho, 1e-12));
  CHECK(is_positive_semidefinite(rho));
  CHECK(lindblad_rhs(m, rho, 0.5 * p.tau).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("steady state rejects a channel-free model") {
  TwoLevelParams p;
  Model m = build_two_level_model(p);
  m.channels.clear();  // unitary evolution: every H eigenprojector is a fixed point
  CHECK_THROWS_AS(steady_state(m), SteadyStateError);
}

TEST_CASE("undriven relaxation matches the closed-form rate equations") {
  TwoLevelParams p;
  p.epsilon = 0;
  Model m = build_two_level_model(p);
  const double nbar = thermal_occupation(p.beta, p.omega);
  const double rate = p.gamma0 * (2 * nbar + 1);
  const double p1_inf = nbar / (2 * nbar + 1);

  Matrix rho0(2, 2);
  rho0 << 0.7, Complex(0.1, 0.05), Complex(0.1, -0.05), 0.3;
  for (double t : {50.0, 300.0, 900.0}) {
    Matrix rho = lindblad_propagate(m, rho0, 0.0, t);
    double p1 = rho(1, 1).real();
    double expected = p1_inf + (0.3 - p1_inf) * std::exp(-rate * t);
    CHECK(p1 == doctest::Approx(expected).epsilon(1e-10));
    // Coherences decay at half the population relaxation rate when H = 0.
    Complex c = rho0(0, 1) * std::exp(-0.5 * rate * t);
    CHECK(std::abs(rho(0, 1) - c) < 1e-12);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
  }
}

TEST_CASE("propagation composes and preserves trace and positivity") {
  Model m = build_two_level_model(TwoLevelParams{});
  Matrix rho0 = ground_state();
  Matrix direct = lindblad_propagate(m, rho0, 0.0, 800.0);
  Matrix stepped = lindblad_propagate(m, lindblad_propagate(m, rho0, 0.0, 350.0), 350.0, 800.0);
  CHECK((direct - stepped).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(direct.trace().real() - 1.0) < 1e-12);
  CHECK(is_positive_semidefinite(direct));
}

TEST_CASE("no-jump propagator dampens eigenstates at the known rates") {
  TwoLevelParams p;
  p.epsilon = 0;
  Model m = build_two_level_model(p);
  const double nbar = thermal_occupation(p.beta, p.omega);
  const double t = 400.0;
  Matrix u = no_jump_propagator(m, 0.0, t);

  Vector excited = Vector::Zero(2), ground = Vector::Zero(2);
  excited(1) = 1;
  ground(0) = 1;
  // |U psi|^2 = exp(-<L^dagger L> t) for H_eff eigenvectors.
  CHECK((u * excited).squaredNorm() ==
        doctest::Approx(std::exp(-p.gamma0 * (nbar + 1) * t)).epsilon(1e-10));
  CHECK((u * ground).squaredNorm() ==
        doctest::Approx(std::exp(-p.gamma0 * nbar * t)).epsilon(1e-10));
}

TEST_CASE("hidden propagator interpolates between Lindblad and pure no-jump") {
  const double t = 200.0;

  SUBCASE("efficiency zero reproduces the unconditional evolution") {
    TwoLevelParams p;
    p.eta_minus = 0;
    p.eta_plus = 0;
    Model m = build_two_level_model(p);
    Matrix hidden = hidden_propagator(m, 0.0, t);
    Matrix rho0(2, 2);
    rho0 << 0.6, Complex(0.2, -0.1), Complex(0.2, 0.1), 0.4;
    Matrix via_hidden = unvectorize(hidden * vectorize(rho0), 2);
    Matrix via_lindblad = lindblad_propagate(m, rho0, 0.0, t);
    CHECK((via_hidden - via_lindblad).cwiseAbs().maxCoeff() < 1e-12);
    // Trace preserving: identity is a left fixed point.
    Vector vec_id = vectorize(Matrix::Identity(2, 2));
    CHECK(std::abs((vec_id.adjoint() * hidden * vectorize(rho0)).value() -
                   rho0.trace()) < 1e-12);
  }

  SUBCASE("efficiency one reduces to no-jump conjugation") {
    TwoLevelParams p;
    p.eta_minus = 1;
    p.eta_plus = 1;
    Model m = build_two_level_model(p);
    Matrix hidden = hidden_propagator(m, 0.0, t);
    Matrix u = no_jump_propagator(m, 0.0, t);
    CHECK((hidden - kron(u.conjugate(), u)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("jump superoperator carries the detection efficiency") {
  TwoLevelParams p;
  p.eta_minus = 0.3;
  Model m = build_two_level_model(p);
  Matrix j = jump_superoperator(m, kEmission);
  Matrix sigma(2, 2);
  sigma << 0.5, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.5;
  const Matrix& l = m.channels[kEmission].op;
  Matrix expected = 0.3 * (l * sigma * l.adjoint());
  CHECK((unvectorize(j * vectorize(sigma), 2) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("first-order measurement step completeness residual is O(dt^2)") {
  Model m = build_two_level_model(TwoLevelParams{});
  KrausStep big = kraus_step(m, 0.0, 1.0);
  KrausStep small = kraus_step(m, 0.0, 0.5);
  CHECK(big.completeness_residual > 0);
  CHECK(big.completeness_residual / small.completeness_residual == doctest::Approx(4.0).epsilon(0.05));

  // Residual measured directly: |sum M^dagger M - 1|_max.
  Matrix acc = big.no_jump.adjoint() * big.no_jump;
  for (const auto& [k, op] : big.visible) acc += op.adjoint() * op;
  for (const auto& [k, op] : big.hidden) acc += op.adjoint() * op;
  CHECK((acc - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() ==
        doctest::Approx(big.completeness_residual).epsilon(1e-12));

  // Visible and hidden branch weights split as eta : 1 - eta.
  TwoLevelParams q;
  q.eta_minus = 0.25;
  q.eta_plus = 0.6;
  KrausStep ks = kraus_step(build_two_level_model(q), 0.0, 0.1);
  REQUIRE(ks.visible.size() == 2);
  REQUIRE(ks.hidden.size() == 2);
  for (std::size_t i = 0; i < ks.visible.size(); ++i) {
    int k = ks.visible[i].first;
    double eta = k == kEmission ? 0.25 : 0.6;
    double ratio = ks.visible[i].second.cwiseAbs().maxCoeff() /
                   ks.hidden[i].second.cwiseAbs().maxCoeff();
    CHECK(ratio == doctest::Approx(std::sqrt(eta / (1 - eta))).epsilon(1e-10));
  }
}

TEST_CASE("reversed generator parts validate and match the reversed model") {
  TwoLevelParams p;
  p.eta_minus = 0.4;
  p.eta_plus = 0.9;
  Model m = build_two_level_model(p);
  ReversedGeneratorParts parts = reversed_generator_parts(m);
  CHECK(validate_model(parts.reversed).empty());
  CHECK(parts.hidden_generators.size() == parts.reversed.protocol.segments.size());
  CHECK(parts.jump_superoperators.size() == parts.reversed.channels.size());
  // Efficiencies exchanged within the pair.
  CHECK(parts.reversed.channels[kEmission].efficiency == doctest::Approx(0.9));
  CHECK(parts.reversed.channels[kAbsorption].efficiency == doctest::Approx(0.4));
  // Jump superoperators carry the exchanged efficiencies.
  Matrix j = parts.jump_superoperators[kEmission];
  const Matrix& l = parts.reversed.channels[kEmission].op;
  Matrix direct = 0.9 * kron(l.conjugate(), l);
  CHECK((j - direct).cwiseAbs().maxCoeff() < 1e-14);
}
