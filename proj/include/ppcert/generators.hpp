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

#ifndef PPCERT_GENERATORS_HPP_
#define PPCERT_GENERATORS_HPP_

#include <random>
#include <vector>

#include "ppcert/beliefs.hpp"
#include "ppcert/mechanisms.hpp"
#include "ppcert/scores.hpp"

namespace ppcert {

// Randomized desk-scale instances for property batteries. Kernel and belief
// probabilities are dyadic (integer counts over a power-of-two denominator),
// so rows sum to exactly 1 and structural zeros are exact.

struct MechanismGenOptions {
  int min_universe = 2;
  int max_universe = 4;
  int min_alphabet = 2;
  int max_alphabet = 5;
  int denominator = 256;    // power of two
  double zero_prob = 0.0;   // chance of zeroing each entry
};

Eigen::VectorXd random_dyadic_distribution(std::mt19937_64& rng, int size,
                                           int denominator, double zero_prob);

FiniteMechanism random_mechanism(std::mt19937_64& rng,
                                 const MechanismGenOptions& opt);

// Second-stage mechanism over the given universe reacting to `input_alphabet`.
FiniteMechanism random_second_stage(std::mt19937_64& rng,
                                    const Universe& universe,
                                    const std::vector<std::string>& input_alphabet,
                                    int max_alphabet, int denominator,
                                    double zero_prob);

// Data-independent kernel from `input_alphabet` to a fresh output alphabet.
FiniteMechanism random_postprocessing_kernel(
    std::mt19937_64& rng, const std::vector<std::string>& input_alphabet,
    int max_alphabet, int denominator, double zero_prob);

FiniteBelief random_belief(std::mt19937_64& rng, const Universe& universe,
                           int denominator = 256, double zero_prob = 0.0);

// Finite loss table with entries uniform on [0, 1].
PrivacyFunction random_privacy_function(std::mt19937_64& rng, int n_decisions,
                                        const Universe& universe);

// Nondegenerate random Gaussian with a full-rank covariance.
GaussianBelief random_gaussian(std::mt19937_64& rng, int dim);

}  // namespace ppcert

#endif  // PPCERT_GENERATORS_HPP_
