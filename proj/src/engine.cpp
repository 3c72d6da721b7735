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

#include "qjt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace qjt {

namespace {

const Complex kI(0.0, 1.0);

Matrix sum_num(const Model& model) {
  Matrix a = Matrix::Zero(model.dim, model.dim);
  for (const auto& c : model.channels) a += c.op.adjoint() * c.op;
  return a;
}

}  // namespace

CachedExpm::CachedExpm(Matrix gen) : gen_(std::move(gen)) {
  Eigen::ComplexEigenSolver<Matrix> es(gen_);
  if (es.info() == Eigen::Success) {
    Matrix v = es.eigenvectors();
    Eigen::FullPivLU<Matrix> lu(v);
    if (lu.isInvertible()) {
      Matrix vinv = lu.inverse();
      double scale = std::max(1.0, gen_.cwiseAbs().maxCoeff());
      double resid =
          (v * es.eigenvalues().asDiagonal() * vinv - gen_).cwiseAbs().maxCoeff();
      if (resid <= 1e-12 * scale) {
        v_ = std::move(v);
        vinv_ = std::move(vinv);
        lam_ = es.eigenvalues();
        use_eig_ = true;
      }
    }
  }
}

Matrix CachedExpm::matrix(double t) const {
  if (use_eig_) {
    Vector e = (lam_.array() * t).exp();
    return v_ * e.asDiagonal() * vinv_;
  }
  return (gen_ * t).exp();
}

Vector CachedExpm::apply(double t, const Vector& x) const {
  if (use_eig_) {
    Vector y = vinv_ * x;
    y.array() *= (lam_.array() * t).exp();
    return v_ * y;
  }
  return (gen_ * t).exp() * x;
}

Engine::Engine(Model model) : model_(std::move(model)) {
  auto violations = validate_model(model_);
  if (!violations.empty()) throw ModelError("invalid model: " + violations.front());
  const int d = model_.dim;
  const Matrix id = Matrix::Identity(d, d);
  const Matrix a = sum_num(model_);  // sum_k L_k^dagger L_k

  double t = 0;
  for (const auto& seg : model_.protocol.segments) {
    t += seg.duration;
    segment_end_.push_back(t);

    Matrix h_eff = seg.hamiltonian - 0.5 * kI * a;
    h_eff_.push_back(h_eff);
    no_jump_.emplace_back(-kI * h_eff);

    // Column-stacked d^2 generators. The commutator/anticommutator parts are
    // shared; the channel feeding term enters the unconditional generator in
    // full and the hidden generator with weight (1 - eta).
    Matrix base = -kI * (kron(id, seg.hamiltonian) - kron(seg.hamiltonian.transpose(), id)) -
                  0.5 * (kron(id, a) + kron(a.transpose(), id));
    Matrix lind = base;
    Matrix hid = base;
    for (const auto& c : model_.channels) {
      Matrix feed = kron(c.op.conjugate(), c.op);
      lind += feed;
      hid += (1.0 - c.efficiency) * feed;
    }
    lindblad_.emplace_back(std::move(lind));
    hidden_.emplace_back(std::move(hid));
  }
  duration_ = segment_end_.empty() ? 0.0 : segment_end_.back();

  for (const auto& c : model_.channels) {
    ChannelOps ops;
    ops.op = c.op;
    ops.num = c.op.adjoint() * c.op;
    Eigen::SelfAdjointEigenSolver<Matrix> es(ops.num);
    ops.lambda_max = es.eigenvalues().maxCoeff();
    ops.jump_super = kron(c.op.conjugate(), c.op);
    channels_.push_back(std::move(ops));
  }
}

const Matrix& Engine::lindblad_generator(int segment) const {
  return lindblad_.at(segment).generator();
}

const Matrix& Engine::hidden_generator(int segment) const {
  return hidden_.at(segment).generator();
}

const Matrix& Engine::effective_hamiltonian(int segment) const { return h_eff_.at(segment); }

void Engine::walk(double t0, double t1,
                  const std::function<void(int, double)>& fn) const {
  if (t1 < t0 - 1e-12) throw RecordError("propagation interval reversed");
  if (t0 < -1e-9 || t1 > duration_ + 1e-9) throw RecordError("interval outside protocol");
  double t = std::max(t0, 0.0);
  const double end = std::min(t1, duration_);
  if (end <= t) return;
  int idx = 0;
  while (idx + 1 < static_cast<int>(segment_end_.size()) && t >= segment_end_[idx]) ++idx;
  while (t < end - 1e-15 * std::max(1.0, end)) {
    double stop = std::min(segment_end_[idx], end);
    if (stop > t) fn(idx, stop - t);
    t = stop;
    if (idx + 1 < static_cast<int>(segment_end_.size())) ++idx;
    else break;
  }
}

Matrix Engine::no_jump_matrix(double t0, double t1) const {
  Matrix u = Matrix::Identity(model_.dim, model_.dim);
  walk(t0, t1, [&](int seg, double dt) { u = no_jump_[seg].matrix(dt) * u; });
  return u;
}

Vector Engine::no_jump_apply(double t0, double t1, const Vector& psi) const {
  Vector x = psi;
  walk(t0, t1, [&](int seg, double dt) { x = no_jump_[seg].apply(dt, x); });
  return x;
}

Vector Engine::lindblad_apply(double t0, double t1, const Vector& vec_x) const {
  Vector x = vec_x;
  walk(t0, t1, [&](int seg, double dt) { x = lindblad_[seg].apply(dt, x); });
  return x;
}

Vector Engine::hidden_apply(double t0, double t1, const Vector& vec_x) const {
  Vector x = vec_x;
  walk(t0, t1, [&](int seg, double dt) { x = hidden_[seg].apply(dt, x); });
  return x;
}

Matrix Engine::lindblad_matrix(double t0, double t1) const {
  const int d2 = model_.dim * model_.dim;
  Matrix u = Matrix::Identity(d2, d2);
  walk(t0, t1, [&](int seg, double dt) { u = lindblad_[seg].matrix(dt) * u; });
  return u;
}

Matrix Engine::hidden_matrix(double t0, double t1) const {
  const int d2 = model_.dim * model_.dim;
  Matrix u = Matrix::Identity(d2, d2);
  walk(t0, t1, [&](int seg, double dt) { u = hidden_[seg].matrix(dt) * u; });
  return u;
}

std::optional<Engine::NormCrossing> Engine::locate_norm_crossing(double t0, double t_max,
                                                                 const Vector& psi,
                                                                 double target,
                                                                 double tol) const {
  if (target <= 0) throw RecordError("norm crossing target must be positive");
  // March segment by segment to bracket the crossing, then bisect inside the
  // bracketing segment. The squared norm is non-increasing under no-jump
  // evolution, so the first segment whose exit norm falls below the target
  // contains the crossing.
  struct Bracket {
    int seg;
    double t_begin;
    Vector state_begin;
    double t_end;
  };
  std::optional<Bracket> bracket;
  double t = std::max(t0, 0.0);
  Vector x = psi;
  walk(t0, t_max, [&](int seg, double dt) {
    if (bracket) return;
    Vector next = no_jump_[seg].apply(dt, x);
    if (next.squaredNorm() <= target) {
      bracket = Bracket{seg, t, x, t + dt};
    } else {
      x = std::move(next);
      t += dt;
    }
  });
  if (!bracket) return std::nullopt;

  double lo = 0.0;                      // offsets from bracket start
  double hi = bracket->t_end - bracket->t_begin;
  const auto& prop = no_jump_[bracket->seg];
  Vector state = prop.apply(hi, bracket->state_begin);
  double f = state.squaredNorm();
  for (int it = 0; it < 200 && std::abs(f - target) > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    Vector cand = prop.apply(mid, bracket->state_begin);
    double fm = cand.squaredNorm();
    if (fm > target) {
      lo = mid;
    } else {
      hi = mid;
      state = std::move(cand);
      f = fm;
    }
    if (hi - lo < 1e-16 * std::max(1.0, bracket->t_end)) break;
  }
  return NormCrossing{bracket->t_begin + hi, std::move(state)};
}

}  // namespace qjt
