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

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qjt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline Matrix dagger(const Matrix& a) { return a.adjoint(); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

// Kronecker product, used to vectorize superoperators with column stacking:
// vec(A X B) = (B^T (x) A) vec(X).
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Column-stacking vectorization and its inverse.
inline Vector vectorize(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

inline Matrix unvectorize(const Vector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) throw std::invalid_argument("unvectorize: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

inline double hermiticity_error(const Matrix& x) {
  return (x - x.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& x, double tol = 1e-12) {
  return x.rows() == x.cols() && hermiticity_error(x) <= tol;
}

// Smallest eigenvalue of the Hermitian part; PSD check with tolerance.
inline double min_eigenvalue(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (x + x.adjoint()));
  return es.eigenvalues().minCoeff();
}

inline bool is_positive_semidefinite(const Matrix& x, double tol = 1e-10) {
  return min_eigenvalue(x) >= -tol;
}

// Trace distance (1/2) ||a - b||_1 between Hermitian matrices.
inline double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * ((a - b) + (a - b).adjoint()));
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

inline bool all_finite(const Matrix& x) { return x.allFinite(); }

}  // namespace qjt
