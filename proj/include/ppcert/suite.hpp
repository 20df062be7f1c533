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

#ifndef PPCERT_SUITE_HPP_
#define PPCERT_SUITE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ppcert/certify.hpp"

namespace ppcert {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::int64_t instances = 0;
  double runtime_ms = 0.0;
  std::string worst;  // description of the worst witness, empty when clean
};

struct SuiteConfig {
  std::uint64_t seed = 1;
  int instances = 500;       // propriety / score-generation / equivalence
  int pair_instances = 200;  // composition / receiver post-processing
  std::int64_t search_budget = 1000000;
  int gaussian_samples = 10000;  // per (n, r1, r2) configuration
  bool full_gaussian_grid = false;  // all n in 2..10; else n in {2, 3, 5}
};

struct SuiteResult {
  std::vector<CheckResult> checks;
  bool all_pass = false;
};

// Individual property batteries. Each is deterministic in its seed.
CheckResult check_propriety_battery(std::uint64_t seed, int instances);
CheckResult check_score_generation_battery(std::uint64_t seed, int instances);
CheckResult check_worst_case_loss_battery(std::uint64_t seed, int instances);
CheckResult check_equivalence_battery(std::uint64_t seed, int instances,
                                      int structural_zero_instances);
CheckResult check_composition_battery(std::uint64_t seed, int instances);
CheckResult check_receiver_postprocessing_battery(std::uint64_t seed,
                                                  int instances);
CheckResult check_sender_counterexample(std::uint64_t seed,
                                        std::int64_t budget);
CheckResult check_average_bound_battery(std::uint64_t seed,
                                        int samples_per_config,
                                        bool full_grid);
// The two covariance inequalities consumed by the average bound:
// v >= v_i^2 and 1 - v_i^2/v >= (lmin/lmax)(1 - sigma_i^2/|sigma|^2).
CheckResult check_gaussian_inequalities(std::uint64_t seed, int instances);

SuiteResult run_suite(const SuiteConfig& config);

std::string format_suite_table(const SuiteResult& result);

}  // namespace ppcert

#endif  // PPCERT_SUITE_HPP_
