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

#include "ppcert/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "ppcert/errors.hpp"

namespace ppcert {

namespace {

constexpr double kRowSumTol = 1e-12;

void validate_kernel(const Eigen::MatrixXd& kernel, int expected_rows,
                     int expected_cols) {
  if (kernel.rows() != expected_rows || kernel.cols() != expected_cols) {
    throw std::invalid_argument("kernel shape does not match index spaces");
  }
  for (int r = 0; r < kernel.rows(); ++r) {
    double sum = 0.0;
    for (int c = 0; c < kernel.cols(); ++c) {
      const double v = kernel(r, c);
      if (!(v >= 0.0)) {
        throw std::invalid_argument("kernel entry (" + std::to_string(r) +
                                    "," + std::to_string(c) +
                                    ") is negative or NaN");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw std::invalid_argument("kernel row " + std::to_string(r) +
                                  " sums to " + std::to_string(sum) +
                                  ", not 1");
    }
  }
}

void check_distinct_symbols(const std::vector<std::string>& symbols,
                            const char* what) {
  std::set<std::string> seen(symbols.begin(), symbols.end());
  if (seen.size() != symbols.size()) {
    throw std::invalid_argument(std::string(what) +
                                " symbols must be distinct");
  }
  if (symbols.empty()) {
    throw std::invalid_argument(std::string(what) + " must be non-empty");
  }
}

std::vector<std::string> product_alphabet(const std::vector<std::string>& a,
                                          const std::vector<std::string>& b) {
  std::vector<std::string> out;
  out.reserve(a.size() * b.size());
  for (const auto& t1 : a) {
    for (const auto& t2 : b) {
      out.push_back("(" + t1 + "," + t2 + ")");
    }
  }
  return out;
}

}  // namespace

FiniteMechanism::FiniteMechanism(Universe universe,
                                 std::vector<std::string> alphabet,
                                 Eigen::MatrixXd kernel)
    : universe_(std::move(universe)),
      alphabet_(std::move(alphabet)),
      kernel_(std::move(kernel)) {
  check_distinct_symbols(alphabet_, "alphabet");
  validate_kernel(kernel_, universe_.size(), static_cast<int>(alphabet_.size()));
}

FiniteMechanism::FiniteMechanism(Universe universe,
                                 std::vector<std::string> input_alphabet,
                                 std::vector<std::string> alphabet,
                                 Eigen::MatrixXd kernel)
    : universe_(std::move(universe)),
      input_alphabet_(std::move(input_alphabet)),
      alphabet_(std::move(alphabet)),
      kernel_(std::move(kernel)) {
  check_distinct_symbols(alphabet_, "alphabet");
  check_distinct_symbols(input_alphabet_, "input alphabet");
  validate_kernel(kernel_,
                  universe_.size() * static_cast<int>(input_alphabet_.size()),
                  static_cast<int>(alphabet_.size()));
}

double FiniteMechanism::prob(int dataset, int output) const {
  if (is_second_stage()) {
    throw IndexMismatchError("second-stage mechanism needs an input output");
  }
  return kernel_(dataset, output);
}

double FiniteMechanism::prob(int dataset, int input, int output) const {
  if (!is_second_stage()) {
    throw IndexMismatchError("first-stage mechanism takes no input output");
  }
  return kernel_(dataset * n_inputs() + input, output);
}

int FiniteMechanism::output_index(std::string_view id) const {
  for (int i = 0; i < n_outputs(); ++i) {
    if (alphabet_[i] == id) return i;
  }
  throw std::invalid_argument("unknown output id: '" + std::string(id) + "'");
}

FiniteMechanism FiniteMechanism::slice(int input_index) const {
  if (!is_second_stage()) {
    throw IndexMismatchError("slice applies to second-stage mechanisms");
  }
  Eigen::MatrixXd rows(n_datasets(), n_outputs());
  for (int x = 0; x < n_datasets(); ++x) {
    rows.row(x) = kernel_.row(x * n_inputs() + input_index);
  }
  return FiniteMechanism(universe_, alphabet_, std::move(rows));
}

bool FiniteMechanism::data_independent() const {
  const int inputs = is_second_stage() ? n_inputs() : 1;
  for (int t = 0; t < inputs; ++t) {
    for (int x = 1; x < n_datasets(); ++x) {
      const int row = is_second_stage() ? x * inputs + t : x;
      const int ref = is_second_stage() ? t : 0;
      if (!(kernel_.row(row).array() == kernel_.row(ref).array()).all()) {
        return false;
      }
    }
  }
  return true;
}

int FiniteMechanism::sample_output(int dataset, std::mt19937_64& rng) const {
  if (is_second_stage()) {
    throw IndexMismatchError("sampling needs a first-stage mechanism");
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (int t = 0; t < n_outputs(); ++t) {
    acc += kernel_(dataset, t);
    if (u < acc) return t;
  }
  return n_outputs() - 1;
}

NeighborRelation::NeighborRelation(
    std::vector<std::pair<std::string, std::string>> pairs) {
  std::set<std::pair<std::string, std::string>> canonical;
  for (auto& [a, b] : pairs) {
    if (a == b) {
      throw std::invalid_argument("neighbor relation must be irreflexive: '" +
                                  a + "'");
    }
    canonical.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
  }
  pairs_.assign(canonical.begin(), canonical.end());
}

std::vector<std::pair<int, int>> NeighborRelation::ordered_pairs(
    const Universe& universe) const {
  std::vector<std::pair<int, int>> out;
  out.reserve(2 * pairs_.size());
  for (const auto& [a, b] : pairs_) {
    const int ia = universe.index_of(a);
    const int ib = universe.index_of(b);
    out.emplace_back(ia, ib);
    out.emplace_back(ib, ia);
  }
  return out;
}

NeighborRelation complete_neighbors(const Universe& universe) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < universe.size(); ++i) {
    for (int j = i + 1; j < universe.size(); ++j) {
      pairs.emplace_back(universe.id(i), universe.id(j));
    }
  }
  return NeighborRelation(std::move(pairs));
}

NeighborRelation hamming_neighbors(const Universe& universe) {
  if (!universe.has_points()) {
    throw std::invalid_argument(
        "hamming neighbors need a universe of numeric tuples");
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < universe.size(); ++i) {
    for (int j = i + 1; j < universe.size(); ++j) {
      int diff = 0;
      for (int c = 0; c < universe.point_dim(); ++c) {
        if (universe.point(i)(c) != universe.point(j)(c)) ++diff;
      }
      if (diff == 1) pairs.emplace_back(universe.id(i), universe.id(j));
    }
  }
  return NeighborRelation(std::move(pairs));
}

FiniteMechanism randomized_response(double eps, int k) {
  if (k < 2) throw std::invalid_argument("randomized response needs k >= 2");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  const double keep = std::exp(eps) / (std::exp(eps) + k - 1);
  const double flip = 1.0 / (std::exp(eps) + k - 1);
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Constant(k, k, flip);
  kernel.diagonal().setConstant(keep);
  // Re-normalize rows exactly: keep + (k-1)*flip may be 1 +/- 1 ulp.
  for (int r = 0; r < k; ++r) {
    double off = 0.0;
    for (int c = 0; c < k; ++c) {
      if (c != r) off += kernel(r, c);
    }
    kernel(r, r) = 1.0 - off;
  }
  std::vector<double> values(k);
  for (int i = 0; i < k; ++i) values[i] = i;
  Universe universe = scalar_universe(values);
  std::vector<std::string> alphabet = universe.ids();
  return FiniteMechanism(std::move(universe), std::move(alphabet),
                         std::move(kernel));
}

FiniteMechanism identity_mechanism(const Universe& universe) {
  Eigen::MatrixXd kernel =
      Eigen::MatrixXd::Identity(universe.size(), universe.size());
  return FiniteMechanism(universe, universe.ids(), std::move(kernel));
}

FiniteMechanism constant_mechanism(const Universe& universe,
                                   std::vector<std::string> alphabet,
                                   const Eigen::VectorXd& dist) {
  Eigen::MatrixXd kernel(universe.size(), dist.size());
  kernel.rowwise() = dist.transpose();
  return FiniteMechanism(universe, std::move(alphabet), std::move(kernel));
}

FiniteMechanism deterministic_mechanism(const Universe& universe,
                                        std::vector<std::string> alphabet,
                                        const std::vector<int>& output_map) {
  if (static_cast<int>(output_map.size()) != universe.size()) {
    throw std::invalid_argument("output map must cover the universe");
  }
  Eigen::MatrixXd kernel =
      Eigen::MatrixXd::Zero(universe.size(), static_cast<int>(alphabet.size()));
  for (int x = 0; x < universe.size(); ++x) {
    kernel(x, output_map.at(x)) = 1.0;
  }
  return FiniteMechanism(universe, std::move(alphabet), std::move(kernel));
}

FiniteMechanism tensor(const FiniteMechanism& m1, const FiniteMechanism& m2) {
  if (!(m2.universe() == m1.universe())) {
    throw IndexMismatchError("tensor factors must share the dataset universe");
  }
  const bool second_stage = m2.is_second_stage();
  if (second_stage && m2.input_alphabet() != m1.alphabet()) {
    throw IndexMismatchError(
        "second mechanism's input alphabet must be the first's alphabet");
  }
  const int n = m1.n_datasets();
  const int k1 = m1.n_outputs();
  const int k2 = m2.n_outputs();
  Eigen::MatrixXd kernel(n, k1 * k2);
  for (int x = 0; x < n; ++x) {
    for (int t1 = 0; t1 < k1; ++t1) {
      for (int t2 = 0; t2 < k2; ++t2) {
        const double p2 = second_stage ? m2.prob(x, t1, t2) : m2.prob(x, t2);
        kernel(x, t1 * k2 + t2) = m1.prob(x, t1) * p2;
      }
    }
  }
  return FiniteMechanism(m1.universe(),
                         product_alphabet(m1.alphabet(), m2.alphabet()),
                         std::move(kernel));
}

FiniteMechanism tensor_independent(const FiniteMechanism& m,
                                   const FiniteMechanism& k) {
  if (k.is_second_stage() || k.universe().ids() != m.alphabet()) {
    throw IndexMismatchError(
        "post-processing kernel must map the mechanism's alphabet");
  }
  const int n = m.n_datasets();
  const int k1 = m.n_outputs();
  const int k2 = k.n_outputs();
  Eigen::MatrixXd kernel(n, k1 * k2);
  for (int x = 0; x < n; ++x) {
    for (int t1 = 0; t1 < k1; ++t1) {
      for (int t2 = 0; t2 < k2; ++t2) {
        kernel(x, t1 * k2 + t2) = m.prob(x, t1) * k.prob(t1, t2);
      }
    }
  }
  return FiniteMechanism(m.universe(),
                         product_alphabet(m.alphabet(), k.alphabet()),
                         std::move(kernel));
}

FiniteMechanism marginalize_second(const FiniteMechanism& joint, int n_t1,
                                   int n_t2) {
  if (joint.n_outputs() != n_t1 * n_t2) {
    throw IndexMismatchError("joint alphabet does not factor as requested");
  }
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(joint.n_datasets(), n_t2);
  for (int x = 0; x < joint.n_datasets(); ++x) {
    for (int t1 = 0; t1 < n_t1; ++t1) {
      for (int t2 = 0; t2 < n_t2; ++t2) {
        kernel(x, t2) += joint.prob(x, t1 * n_t2 + t2);
      }
    }
  }
  std::vector<std::string> alphabet;
  alphabet.reserve(n_t2);
  for (int t2 = 0; t2 < n_t2; ++t2) {
    // Recover the second-factor symbol from the product id "(t1,t2)"; the
    // factors may themselves be products, so split at depth one.
    const std::string& joint_id = joint.alphabet()[t2];
    std::size_t split = 0;
    int depth = 0;
    for (std::size_t i = 0; i < joint_id.size(); ++i) {
      if (joint_id[i] == '(') ++depth;
      if (joint_id[i] == ')') --depth;
      if (joint_id[i] == ',' && depth == 1) {
        split = i;
        break;
      }
    }
    alphabet.push_back(joint_id.substr(split + 1,
                                       joint_id.size() - split - 2));
  }
  return FiniteMechanism(joint.universe(), std::move(alphabet),
                         std::move(kernel));
}

FiniteMechanism chain(const FiniteMechanism& m, const FiniteMechanism& m2) {
  if (!(m2.universe() == m.universe())) {
    throw IndexMismatchError("chain factors must share the dataset universe");
  }
  const bool second_stage = m2.is_second_stage();
  if (second_stage && m2.input_alphabet() != m.alphabet()) {
    throw IndexMismatchError(
        "second mechanism's input alphabet must be the first's alphabet");
  }
  const int n = m.n_datasets();
  const int k1 = m.n_outputs();
  const int k2 = m2.n_outputs();
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, k2);
  for (int x = 0; x < n; ++x) {
    for (int t1 = 0; t1 < k1; ++t1) {
      for (int t2 = 0; t2 < k2; ++t2) {
        const double p2 = second_stage ? m2.prob(x, t1, t2) : m2.prob(x, t2);
        kernel(x, t2) += m.prob(x, t1) * p2;
      }
    }
  }
  return FiniteMechanism(m.universe(), m2.alphabet(), std::move(kernel));
}

FiniteMechanism chain_independent(const FiniteMechanism& m,
                                  const FiniteMechanism& k) {
  if (k.is_second_stage() || k.universe().ids() != m.alphabet()) {
    throw IndexMismatchError(
        "post-processing kernel must map the mechanism's alphabet");
  }
  Eigen::MatrixXd kernel = m.kernel() * k.kernel();
  return FiniteMechanism(m.universe(), k.alphabet(), std::move(kernel));
}

double average_mechanism(const Eigen::VectorXd& x) {
  if (x.size() < 2) {
    throw std::invalid_argument("average mechanism needs n >= 2");
  }
  return x.mean();
}

}  // namespace ppcert
