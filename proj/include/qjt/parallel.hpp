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

#include <exception>

namespace qjt {

// Run body(i) for i in [0, count), across OpenMP workers when `parallel` is
// set. Exceptions must not escape a parallel region, so the first one is
// captured and rethrown after the loop joins. Bodies write results indexed
// by i; with per-index RNG streams this makes results independent of
// scheduling.
template <class F>
void indexed_loop(int count, bool parallel, F&& body) {
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(qjt_indexed_loop)
      {
        if (!err) err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace qjt
