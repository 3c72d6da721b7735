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

// Benchmark of the OpenMP kernels against their serial reference
// implementations. Both paths must produce bitwise-identical results; the
// comparison is asserted here as well as in the test suite.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qjt/conditioning.hpp"
#include "qjt/context.hpp"
#include "qjt/model.hpp"
#include "qjt/records.hpp"
#include "qjt/sampling.hpp"

namespace {

template <class F>
double timed(F&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int count = argc > 1 ? std::atoi(argv[1]) : 2000;
  std::uint64_t seed = 20260814;

  qjt::TwoLevelParams p;
  p.tau = 1.0 / p.gamma0;
  p.eta_minus = 0.2;
  p.eta_plus = 0.2;
  qjt::TrajectoryContext ctx =
      qjt::make_steady_state_context(qjt::build_two_level_model(p));

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled at build time\n");
#endif

  std::vector<qjt::FullRecord> par, ser;
  double t_par = timed([&] { par = qjt::sample_ensemble(ctx, count, seed); });
  double t_ser = timed([&] { ser = qjt::sample_ensemble_serial(ctx, count, seed); });
  bool same = par.size() == ser.size();
  for (std::size_t i = 0; same && i < par.size(); ++i)
    same = qjt::format_record(par[i], 1.0) == qjt::format_record(ser[i], 1.0);
  std::printf("ensemble            %6d trajectories: parallel %8.3f s, serial %8.3f s, "
              "speedup %.2fx, identical %s\n",
              count, t_par, t_ser, t_ser / std::max(t_par, 1e-12), same ? "yes" : "NO");
  if (!same) return 1;

  qjt::VisibleRecord rec{0, {{0.5 / p.gamma0, qjt::kEmission}}, 0, p.tau};
  qjt::ConditionalBatch bpar, bser;
  double c_par =
      timed([&] { bpar = qjt::sample_conditional_batch(rec, ctx, count, seed); });
  double c_ser =
      timed([&] { bser = qjt::sample_conditional_batch_serial(rec, ctx, count, seed); });
  same = bpar.records.size() == bser.records.size() &&
         bpar.total_attempts == bser.total_attempts && bpar.failed == bser.failed;
  for (std::size_t i = 0; same && i < bpar.records.size(); ++i)
    same = qjt::format_record(bpar.records[i], 1.0) ==
           qjt::format_record(bser.records[i], 1.0);
  std::printf("conditional batch   %6d samples:      parallel %8.3f s, serial %8.3f s, "
              "speedup %.2fx, identical %s\n",
              count, c_par, c_ser, c_ser / std::max(c_par, 1e-12), same ? "yes" : "NO");
  return same ? 0 : 1;
}
