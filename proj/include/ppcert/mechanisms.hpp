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

#ifndef PPCERT_MECHANISMS_HPP_
#define PPCERT_MECHANISMS_HPP_

#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ppcert/universe.hpp"

namespace ppcert {

// Row-stochastic kernel from a finite dataset universe to a finite output
// alphabet. Rows are indexed by dataset, or -- for second-stage mechanisms
// that may react to a previous release -- by (dataset, input output) in
// dataset-major order. Rows sum to 1 within 1e-12, entries are nonnegative.
class FiniteMechanism {
 public:
  FiniteMechanism(Universe universe, std::vector<std::string> alphabet,
                  Eigen::MatrixXd kernel);
  // Second-stage form: row (x, t) at index x * |input_alphabet| + t.
  FiniteMechanism(Universe universe, std::vector<std::string> input_alphabet,
                  std::vector<std::string> alphabet, Eigen::MatrixXd kernel);

  const Universe& universe() const { return universe_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<std::string>& input_alphabet() const {
    return input_alphabet_;
  }
  const Eigen::MatrixXd& kernel() const { return kernel_; }

  bool is_second_stage() const { return !input_alphabet_.empty(); }
  int n_datasets() const { return universe_.size(); }
  int n_outputs() const { return static_cast<int>(alphabet_.size()); }
  int n_inputs() const { return static_cast<int>(input_alphabet_.size()); }

  // m(x, t); first-stage only.
  double prob(int dataset, int output) const;
  // m((x, t_in), t); second-stage only.
  double prob(int dataset, int input, int output) const;

  int output_index(std::string_view id) const;

  // The first-stage mechanism M((., t), .) obtained by fixing the input
  // output of a second-stage mechanism.
  FiniteMechanism slice(int input_index) const;

  // True when all rows with the same input output agree across datasets.
  // First-stage mechanisms are data-dependent by construction and return
  // false unless all dataset rows coincide.
  bool data_independent() const;

  int sample_output(int dataset, std::mt19937_64& rng) const;

 private:
  Universe universe_;
  std::vector<std::string> input_alphabet_;  // empty for first-stage
  std::vector<std::string> alphabet_;
  Eigen::MatrixXd kernel_;
};

// Symmetric irreflexive relation over dataset ids. Pairs are stored once in
// canonical (lexicographically sorted) order.
class NeighborRelation {
 public:
  NeighborRelation() = default;
  explicit NeighborRelation(
      std::vector<std::pair<std::string, std::string>> pairs);

  const std::vector<std::pair<std::string, std::string>>& pairs() const {
    return pairs_;
  }
  bool empty() const { return pairs_.empty(); }

  // Both orientations of every pair, resolved to indices in `universe`.
  std::vector<std::pair<int, int>> ordered_pairs(const Universe& universe) const;

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
};

// All pairs of distinct members.
NeighborRelation complete_neighbors(const Universe& universe);
// Pairs of members whose coordinate tuples differ in exactly one position.
// Requires a universe with points of common dimension.
NeighborRelation hamming_neighbors(const Universe& universe);

// Canonical eps-randomized response on k symbols: the true symbol is kept
// with probability e^eps / (e^eps + k - 1), otherwise a uniformly random
// other symbol is released.
FiniteMechanism randomized_response(double eps, int k);

FiniteMechanism identity_mechanism(const Universe& universe);
// All rows equal to `dist` over `alphabet`: releases nothing about the data.
FiniteMechanism constant_mechanism(const Universe& universe,
                                   std::vector<std::string> alphabet,
                                   const Eigen::VectorXd& dist);
// Point-mass kernel of the map universe[i] -> alphabet[output_map[i]].
FiniteMechanism deterministic_mechanism(const Universe& universe,
                                        std::vector<std::string> alphabet,
                                        const std::vector<int>& output_map);

// Joint release (T1, T2) with T1 ~ M1(x,.) and T2 ~ M2((x,T1),.). M2 may be
// second-stage (input alphabet = M1's alphabet), or first-stage on the same
// universe, in which case its rows are broadcast over T1.
FiniteMechanism tensor(const FiniteMechanism& m1, const FiniteMechanism& m2);
// Joint release where the second kernel K: T1 -> T2 is independent of the
// data (its "universe" must be M's alphabet).
FiniteMechanism tensor_independent(const FiniteMechanism& m,
                                   const FiniteMechanism& k);

// Marginal of the joint release: only T2 is published. Same second-argument
// forms as tensor/tensor_independent.
FiniteMechanism chain(const FiniteMechanism& m, const FiniteMechanism& m2);
FiniteMechanism chain_independent(const FiniteMechanism& m,
                                  const FiniteMechanism& k);

// Sums the product-alphabet columns of a joint kernel over its first factor.
FiniteMechanism marginalize_second(const FiniteMechanism& joint, int n_t1,
                                   int n_t2);

// The exact empirical average of a real dataset vector, n >= 2.
double average_mechanism(const Eigen::VectorXd& x);

// Marker type for the noiseless-average release in certification entry
// points that accept either mechanism kind.
struct AverageMechanism {};

}  // namespace ppcert

#endif  // PPCERT_MECHANISMS_HPP_
