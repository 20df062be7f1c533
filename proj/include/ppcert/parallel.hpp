// Copyright 2026 The ppcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PPCERT_PARALLEL_HPP_
#define PPCERT_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace ppcert {

// Worker cap: PP_CERT_THREADS if set, else the hardware concurrency.
int worker_count();

// Runs fn(0..n-1), possibly across threads. Workers must be pure relative to
// each other; results keyed by index stay deterministic for any thread
// count. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ppcert

#endif  // PPCERT_PARALLEL_HPP_
