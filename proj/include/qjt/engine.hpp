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

#include <functional>
#include <optional>
#include <vector>

#include "qjt/complex_linalg.hpp"
#include "qjt/model.hpp"

namespace qjt {

// exp(G t) evaluated for arbitrary t. Diagonalizes G once; if the
// eigendecomposition is ill-conditioned, falls back to a scaling-and-squaring
// exponential per call. Immutable after construction (safe for concurrent
// readers).
class CachedExpm {
 public:
  CachedExpm() = default;
  explicit CachedExpm(Matrix gen);

  Matrix matrix(double t) const;
  Vector apply(double t, const Vector& x) const;
  const Matrix& generator() const { return gen_; }

 private:
  Matrix gen_;
  bool use_eig_ = false;
  Matrix v_, vinv_;
  Vector lam_;
};

// Precomputed propagators for one model: per protocol segment, the
// non-Hermitian no-jump generator -i(H - i/2 sum L^dagger L) on state vectors
// and the column-stacked d^2 x d^2 generators of the unconditional (Lindblad)
// and no-visible-jump (hidden) evolutions; per channel, the jump operator
// data. Built eagerly so hot loops never mutate shared state.
class Engine {
 public:
  struct ChannelOps {
    Matrix op;           // L
    Matrix num;          // L^dagger L
    double lambda_max;   // largest eigenvalue of L^dagger L
    Matrix jump_super;   // conj(L) (x) L, no efficiency factor
  };

  explicit Engine(Model model);

  const Model& model() const { return model_; }
  int dim() const { return model_.dim; }
  double duration() const { return duration_; }
  int segment_count() const { return static_cast<int>(model_.protocol.segments.size()); }
  int channel_count() const { return static_cast<int>(model_.channels.size()); }
  const ChannelOps& channel(int k) const { return channels_[k]; }

  const Matrix& lindblad_generator(int segment) const;
  const Matrix& hidden_generator(int segment) const;
  const Matrix& effective_hamiltonian(int segment) const;

  // No-jump propagator U(t1, t0) (time-ordered across segments).
  Matrix no_jump_matrix(double t0, double t1) const;
  Vector no_jump_apply(double t0, double t1, const Vector& psi) const;

  // exp of the d^2 generators across [t0, t1], acting on vectorized matrices.
  Vector lindblad_apply(double t0, double t1, const Vector& vec_x) const;
  Vector hidden_apply(double t0, double t1, const Vector& vec_x) const;
  Matrix lindblad_matrix(double t0, double t1) const;
  Matrix hidden_matrix(double t0, double t1) const;

  // Earliest time t in (t0, t_max] where |U(t, t0) psi|^2 crosses `target`
  // (psi need not be normalized; the squared norm is measured in absolute
  // terms). Returns the unnormalized state at the crossing, located by
  // bisection to absolute squared-norm tolerance `tol`. Empty when the norm
  // stays above the target through t_max.
  struct NormCrossing {
    double time;
    Vector state;  // unnormalized
  };
  std::optional<NormCrossing> locate_norm_crossing(double t0, double t_max, const Vector& psi,
                                                   double target, double tol = 1e-10) const;

 private:
  void walk(double t0, double t1,
            const std::function<void(int segment, double dt)>& fn) const;

  Model model_;
  double duration_ = 0;
  std::vector<double> segment_end_;  // cumulative segment boundaries
  std::vector<CachedExpm> no_jump_;  // on state vectors, generator -i H_eff
  std::vector<CachedExpm> lindblad_;
  std::vector<CachedExpm> hidden_;
  std::vector<Matrix> h_eff_;
  std::vector<ChannelOps> channels_;
};

}  // namespace qjt
