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

#include "qjt/context.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qjt/propagators.hpp"

namespace qjt {

namespace {

// Lexicographic comparison of complex vectors (real part, then imaginary
// part, component by component); used only to break eigenvalue ties
// deterministically.
bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

Vector fix_phase(Vector v) {
  Eigen::Index pivot = 0;
  double best = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double mag = std::abs(v(i));
    if (mag > best + 1e-12) {
      best = mag;
      pivot = i;
    }
  }
  if (best > 0) {
    Complex phase = v(pivot) / std::abs(v(pivot));
    v /= phase;
  }
  return v;
}

}  // namespace

MeasurementBasis eigenbasis_of(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw ModelError("eigenbasis_of: matrix not square");
  if (!is_hermitian(rho, 1e-9)) throw ModelError("eigenbasis_of: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  const int d = static_cast<int>(rho.rows());

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Vector> fixed(d);
  for (int i = 0; i < d; ++i) fixed[i] = fix_phase(es.eigenvectors().col(i));
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double ea = es.eigenvalues()(a), eb = es.eigenvalues()(b);
    if (std::abs(ea - eb) > 1e-12) return ea > eb;
    return lex_less(fixed[a], fixed[b]);
  });

  MeasurementBasis basis;
  basis.vectors = Matrix(d, d);
  basis.probabilities = RealVector(d);
  for (int i = 0; i < d; ++i) {
    basis.vectors.col(i) = fixed[order[i]];
    basis.probabilities(i) = std::max(0.0, es.eigenvalues()(order[i]));
  }
  return basis;
}

std::vector<std::string> validate_basis(const MeasurementBasis& basis) {
  std::vector<std::string> v;
  const int d = basis.size();
  if (d == 0) {
    v.push_back("basis is empty");
    return v;
  }
  if (basis.vectors.rows() != d) v.push_back("basis is not complete (not square)");
  if (basis.probabilities.size() != d) v.push_back("probability count mismatch");
  if ((basis.vectors.adjoint() * basis.vectors - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() >
      1e-10)
    v.push_back("basis vectors are not orthonormal");
  if (basis.probabilities.size() == d) {
    if (basis.probabilities.minCoeff() < -1e-12) v.push_back("negative outcome probability");
    if (std::abs(basis.probabilities.sum() - 1.0) > 1e-12)
      v.push_back("outcome probabilities do not sum to 1");
  }
  return v;
}

TrajectoryContext make_context(const Model& model, const Matrix& rho0) {
  TrajectoryContext ctx;
  ctx.model = model;
  ctx.tau = model.duration();
  ctx.engine = std::make_shared<Engine>(model);
  ctx.reversed_engine = std::make_shared<Engine>(reverse_model(model));
  ctx.initial = eigenbasis_of(rho0);
  Matrix rho_tau =
      unvectorize(ctx.engine->lindblad_apply(0.0, ctx.tau, vectorize(rho0)), model.dim);
  rho_tau = 0.5 * (rho_tau + rho_tau.adjoint());
  ctx.final_basis = eigenbasis_of(rho_tau);
  auto iv = validate_basis(ctx.initial);
  auto fv = validate_basis(ctx.final_basis);
  if (!iv.empty()) throw ModelError("initial basis: " + iv.front());
  if (!fv.empty()) throw ModelError("final basis: " + fv.front());
  return ctx;
}

TrajectoryContext make_steady_state_context(const Model& model) {
  return make_context(model, steady_state(model));
}

MeasurementBasis time_reverse_basis(const MeasurementBasis& basis, const Model& model) {
  MeasurementBasis out = basis;
  const Matrix& u = model.reversal_basis;
  for (int i = 0; i < basis.size(); ++i) {
    Vector v = basis.vectors.col(i);
    out.vectors.col(i) = (u.size() == 0) ? Vector(v.conjugate()) : Vector(u * (u.adjoint() * v).conjugate());
  }
  return out;
}

TrajectoryContext reverse_context(const TrajectoryContext& ctx) {
  TrajectoryContext rev;
  rev.model = ctx.reversed_engine->model();
  rev.tau = ctx.tau;
  rev.engine = ctx.reversed_engine;
  rev.reversed_engine = ctx.engine;
  rev.initial = time_reverse_basis(ctx.final_basis, ctx.model);
  rev.final_basis = time_reverse_basis(ctx.initial, ctx.model);
  return rev;
}

}  // namespace qjt
