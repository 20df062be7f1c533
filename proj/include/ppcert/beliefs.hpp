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

#ifndef PPCERT_BELIEFS_HPP_
#define PPCERT_BELIEFS_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ppcert/mechanisms.hpp"
#include "ppcert/universe.hpp"

namespace ppcert {

// Eigenvalues at or below kRankTol times the largest eigenvalue are treated
// as numerically zero.
inline constexpr double kRankTol = 1e-10;

// Discrete probability distribution over a finite dataset universe.
// Probabilities are nonnegative and sum to 1 within 1e-12.
class FiniteBelief {
 public:
  FiniteBelief(Universe universe, Eigen::VectorXd probs);

  const Universe& universe() const { return universe_; }
  const Eigen::VectorXd& probs() const { return probs_; }
  double prob(int i) const { return probs_(i); }
  int size() const { return static_cast<int>(probs_.size()); }
  int support_size() const;

  static FiniteBelief point_mass(Universe universe, int index);
  static FiniteBelief uniform(Universe universe);

 private:
  Universe universe_;
  Eigen::VectorXd probs_;
};

// Prior placing mass w on dataset x and 1-w on a distinct alternative.
struct TwoPointPrior {
  std::string x;
  std::string x_prime;
  double w = 0.5;  // mass on x, in (0, 1]

  TwoPointPrior(std::string x, std::string x_prime, double w);
  FiniteBelief to_belief(const Universe& universe) const;
};

// Multivariate Gaussian belief, possibly rank-deficient. The covariance is
// stored at full size n x n together with its numerical support rank; the
// moment-based scores only ever read marginals.
class GaussianBelief {
 public:
  GaussianBelief(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  int dim() const { return static_cast<int>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  int support_rank() const { return support_rank_; }
  bool full_rank() const { return support_rank_ == dim(); }

  double marginal_mean(int i) const { return mean_(i); }
  double marginal_var(int i) const { return cov_(i, i); }

  // mean + sqrt(cov) * z with z standard normal; supported on the belief's
  // affine support subspace.
  Eigen::VectorXd sample(std::mt19937_64& rng) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd sqrt_;
  int support_rank_;
};

// Covariance split into marginal standard deviations and the correlation
// matrix, with the correlation's extreme eigenvalues and condition number.
struct CorrelationDecomposition {
  Eigen::VectorXd sigma;
  Eigen::MatrixXd phi;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double cond = 0.0;  // lambda_max / lambda_min
};

// Decomposes a covariance with strictly positive diagonal. Throws
// SingularCorrelationError when the correlation's smallest eigenvalue is at
// or below the rank tolerance (the condition number would be unbounded).
CorrelationDecomposition correlation_decompose(const Eigen::MatrixXd& cov);

// Parameters of the Gaussian prior class tied to a true dataset x: the prior
// guess of the data average may be off by at most r1 standard scores, and no
// marginal may dominate the total variance relative to the correlation's
// condition number (bounded by r2).
struct GaussianClassSpec {
  double r1;  // > 0
  double r2;  // > 1
  Eigen::VectorXd x;

  GaussianClassSpec(double r1, double r2, Eigen::VectorXd x);
  int dim() const { return static_cast<int>(x.size()); }
  double xbar() const { return x.mean(); }
};

struct ClassMembershipReport {
  bool member = false;
  // Condition 1: squared standardized error of the prior's average guess.
  double mean_term = 0.0;
  double mean_slack = 0.0;  // r1 - mean_term
  // Condition 2: min over coordinates of r2 * (1 - sigma_i^2/|sigma|^2) - cond.
  double cond = 0.0;
  double corr_slack = 0.0;
  int worst_coordinate = -1;  // 0-based argmin of the condition-2 slack
};

// --- Operations ---

// Bayes update of a finite prior after observing `output_index` from `mech`.
// Throws ZeroEvidenceError when the output has zero marginal probability.
FiniteBelief posterior_update(const FiniteBelief& prior,
                              const FiniteMechanism& mech, int output_index);

// Exact conditioning of a full-rank Gaussian prior on the event that the
// coordinate average equals xbar. The posterior is the rank-(n-1) Gaussian
//   mean + cov u (xbar - mean_avg) / (u' cov u),  cov - cov u u' cov / (u' cov u)
// with u = (1/n, ..., 1/n). Throws DegenerateInputError when u' cov u is
// numerically zero (the prior already determines the average).
GaussianBelief gaussian_condition_on_average(const GaussianBelief& prior,
                                             double xbar);

// Weak-inequality membership test for the Gaussian prior class, with the
// slack of each condition. Requires a full-rank prior.
ClassMembershipReport in_gaussian_class(const GaussianBelief& prior,
                                        const GaussianClassSpec& spec);

// Rejection sampler for the Gaussian prior class. Proposal: correlation from
// a normalized random PSD matrix (with an exact-identity stratum), log-uniform
// marginal standard deviations (with an all-equal stratum), and a mean shifted
// so the average-guess condition holds by construction; condition 2 is
// enforced by rejection. The boundary strata keep classes reachable whose
// interior is empty (e.g. n = 2 with r2 = 2 forces identity correlation and
// equal variances). Monte Carlo statements over the class are always relative
// to this proposal. Deterministic in (seed, count); each sample draws from its
// own seeded stream, so results do not depend on evaluation order. Throws
// SamplingExhaustedError if any sample exceeds the per-sample attempt budget.
std::vector<GaussianBelief> sample_gaussian_class(const GaussianClassSpec& spec,
                                                  std::uint64_t seed, int count,
                                                  int attempt_budget = 100000);

}  // namespace ppcert

#endif  // PPCERT_BELIEFS_HPP_
