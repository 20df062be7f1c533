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

#include "ppcert/generators.hpp"

#include <algorithm>
#include <cmath>

namespace ppcert {

Eigen::VectorXd random_dyadic_distribution(std::mt19937_64& rng, int size,
                                           int denominator, double zero_prob) {
  std::uniform_int_distribution<int> cut(0, denominator);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, size - 1);
  std::vector<int> counts(size, 0);
  if (size == 1) {
    counts[0] = denominator;
  } else {
    // Stars and bars: a uniform composition of the denominator.
    std::vector<int> cuts(size - 1);
    for (auto& c : cuts) c = cut(rng);
    std::sort(cuts.begin(), cuts.end());
    int prev = 0;
    for (int i = 0; i < size - 1; ++i) {
      counts[i] = cuts[i] - prev;
      prev = cuts[i];
    }
    counts[size - 1] = denominator - prev;
    for (int i = 0; i < size; ++i) {
      if (counts[i] > 0 && unif(rng) < zero_prob) {
        int j = pick(rng);
        if (j == i) j = (j + 1) % size;
        counts[j] += counts[i];
        counts[i] = 0;
      }
    }
  }
  Eigen::VectorXd out(size);
  for (int i = 0; i < size; ++i) {
    out(i) = static_cast<double>(counts[i]) / denominator;
  }
  return out;
}

FiniteMechanism random_mechanism(std::mt19937_64& rng,
                                 const MechanismGenOptions& opt) {
  std::uniform_int_distribution<int> usize(opt.min_universe, opt.max_universe);
  std::uniform_int_distribution<int> asize(opt.min_alphabet, opt.max_alphabet);
  const int n = usize(rng);
  const int k = asize(rng);
  std::vector<double> data(n);
  for (int i = 0; i < n; ++i) data[i] = i;
  Universe universe = scalar_universe(data);
  Eigen::MatrixXd kernel(n, k);
  for (int x = 0; x < n; ++x) {
    kernel.row(x) =
        random_dyadic_distribution(rng, k, opt.denominator, opt.zero_prob)
            .transpose();
  }
  std::vector<std::string> alphabet;
  alphabet.reserve(k);
  for (int t = 0; t < k; ++t) alphabet.push_back("t" + std::to_string(t));
  return FiniteMechanism(std::move(universe), std::move(alphabet),
                         std::move(kernel));
}

FiniteMechanism random_second_stage(std::mt19937_64& rng,
                                    const Universe& universe,
                                    const std::vector<std::string>& input_alphabet,
                                    int max_alphabet, int denominator,
                                    double zero_prob) {
  std::uniform_int_distribution<int> asize(2, max_alphabet);
  const int k = asize(rng);
  const int rows = universe.size() * static_cast<int>(input_alphabet.size());
  Eigen::MatrixXd kernel(rows, k);
  for (int r = 0; r < rows; ++r) {
    kernel.row(r) =
        random_dyadic_distribution(rng, k, denominator, zero_prob).transpose();
  }
  std::vector<std::string> alphabet;
  alphabet.reserve(k);
  for (int t = 0; t < k; ++t) alphabet.push_back("u" + std::to_string(t));
  return FiniteMechanism(universe, input_alphabet, std::move(alphabet),
                         std::move(kernel));
}

FiniteMechanism random_postprocessing_kernel(
    std::mt19937_64& rng, const std::vector<std::string>& input_alphabet,
    int max_alphabet, int denominator, double zero_prob) {
  std::uniform_int_distribution<int> asize(2, max_alphabet);
  const int k = asize(rng);
  const int rows = static_cast<int>(input_alphabet.size());
  Eigen::MatrixXd kernel(rows, k);
  for (int r = 0; r < rows; ++r) {
    kernel.row(r) =
        random_dyadic_distribution(rng, k, denominator, zero_prob).transpose();
  }
  std::vector<std::string> alphabet;
  alphabet.reserve(k);
  for (int t = 0; t < k; ++t) alphabet.push_back("u" + std::to_string(t));
  return FiniteMechanism(Universe(input_alphabet), std::move(alphabet),
                         std::move(kernel));
}

FiniteBelief random_belief(std::mt19937_64& rng, const Universe& universe,
                           int denominator, double zero_prob) {
  for (;;) {
    Eigen::VectorXd probs = random_dyadic_distribution(
        rng, universe.size(), denominator, zero_prob);
    if (probs.maxCoeff() > 0.0) {
      return FiniteBelief(universe, std::move(probs));
    }
  }
}

PrivacyFunction random_privacy_function(std::mt19937_64& rng, int n_decisions,
                                        const Universe& universe) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd rho(n_decisions, universe.size());
  for (int d = 0; d < n_decisions; ++d) {
    for (int x = 0; x < universe.size(); ++x) rho(d, x) = unif(rng);
  }
  std::vector<std::string> decisions;
  decisions.reserve(n_decisions);
  for (int d = 0; d < n_decisions; ++d) {
    decisions.push_back("d" + std::to_string(d));
  }
  return PrivacyFunction(std::move(decisions), universe, std::move(rho));
}

GaussianBelief random_gaussian(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd mean(dim);
  for (int i = 0; i < dim; ++i) mean(i) = normal(rng);
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = normal(rng);
  }
  Eigen::MatrixXd cov = a * a.transpose() +
                        0.05 * Eigen::MatrixXd::Identity(dim, dim);
  cov = ((cov + cov.transpose()) / 2.0).eval();
  return GaussianBelief(std::move(mean), std::move(cov));
}

}  // namespace ppcert
