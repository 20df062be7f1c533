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

#include "ppcert/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "ppcert/errors.hpp"
#include "ppcert/parallel.hpp"

namespace ppcert {

namespace {

constexpr double kProbSumTol = 1e-12;
constexpr double kSymmetryTol = 1e-10;

// Eigenvalues of a symmetric matrix; exact fast path for diagonal input so
// that identity correlations decompose without rounding noise.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  bool diagonal = true;
  for (int i = 0; i < m.rows() && diagonal; ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) != 0.0) {
        diagonal = false;
        break;
      }
    }
  }
  if (diagonal) {
    Eigen::VectorXd ev = m.diagonal();
    std::sort(ev.data(), ev.data() + ev.size());
    return ev;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  return solver.eigenvalues();  // ascending
}

}  // namespace

FiniteBelief::FiniteBelief(Universe universe, Eigen::VectorXd probs)
    : universe_(std::move(universe)), probs_(std::move(probs)) {
  if (probs_.size() != universe_.size()) {
    throw std::invalid_argument("belief needs one probability per member");
  }
  double sum = 0.0;
  for (int i = 0; i < probs_.size(); ++i) {
    if (!(probs_(i) >= 0.0)) {
      throw std::invalid_argument("belief probability " + std::to_string(i) +
                                  " is negative or NaN");
    }
    sum += probs_(i);
  }
  if (std::abs(sum - 1.0) > kProbSumTol) {
    throw std::invalid_argument("belief probabilities sum to " +
                                std::to_string(sum) + ", not 1");
  }
}

int FiniteBelief::support_size() const {
  int n = 0;
  for (int i = 0; i < probs_.size(); ++i) {
    if (probs_(i) > 0.0) ++n;
  }
  return n;
}

FiniteBelief FiniteBelief::point_mass(Universe universe, int index) {
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(universe.size());
  probs(index) = 1.0;
  return FiniteBelief(std::move(universe), std::move(probs));
}

FiniteBelief FiniteBelief::uniform(Universe universe) {
  const int n = universe.size();
  Eigen::VectorXd probs = Eigen::VectorXd::Constant(n, 1.0 / n);
  probs(n - 1) = 1.0 - probs.head(n - 1).sum();
  return FiniteBelief(std::move(universe), std::move(probs));
}

TwoPointPrior::TwoPointPrior(std::string x_in, std::string x_prime_in,
                             double w_in)
    : x(std::move(x_in)), x_prime(std::move(x_prime_in)), w(w_in) {
  if (x == x_prime) {
    throw std::invalid_argument("two-point prior needs distinct datasets");
  }
  if (!(w > 0.0 && w <= 1.0)) {
    throw std::invalid_argument("two-point prior weight must be in (0, 1]");
  }
}

FiniteBelief TwoPointPrior::to_belief(const Universe& universe) const {
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(universe.size());
  probs(universe.index_of(x)) = w;
  probs(universe.index_of(x_prime)) = 1.0 - w;
  return FiniteBelief(universe, std::move(probs));
}

GaussianBelief::GaussianBelief(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  const int n = static_cast<int>(mean_.size());
  if (cov_.rows() != n || cov_.cols() != n) {
    throw std::invalid_argument("covariance shape must match the mean");
  }
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw std::invalid_argument("covariance is not symmetric");
  }
  cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov_);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("covariance eigendecomposition failed");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double lmax = std::max(0.0, ev(n - 1));
  if (ev(0) < -kSymmetryTol * std::max(1.0, lmax)) {
    throw std::invalid_argument("covariance has a negative eigenvalue");
  }
  const double tol = kRankTol * std::max(lmax, 1e-300);
  support_rank_ = 0;
  Eigen::VectorXd root = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (ev(i) > tol) {
      ++support_rank_;
      root(i) = std::sqrt(ev(i));
    }
  }
  sqrt_ = solver.eigenvectors() * root.asDiagonal();
}

Eigen::VectorXd GaussianBelief::sample(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(dim());
  for (int i = 0; i < dim(); ++i) z(i) = normal(rng);
  return mean_ + sqrt_ * z;
}

CorrelationDecomposition correlation_decompose(const Eigen::MatrixXd& cov) {
  const int n = static_cast<int>(cov.rows());
  if (cov.cols() != n || n == 0) {
    throw std::invalid_argument("covariance must be square and non-empty");
  }
  CorrelationDecomposition out;
  out.sigma.resize(n);
  for (int i = 0; i < n; ++i) {
    if (!(cov(i, i) > 0.0)) {
      throw std::invalid_argument("covariance diagonal must be positive");
    }
    out.sigma(i) = std::sqrt(cov(i, i));
  }
  out.phi.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.phi(i, j) =
          i == j ? 1.0 : cov(i, j) / (out.sigma(i) * out.sigma(j));
    }
  }
  const Eigen::VectorXd ev = symmetric_eigenvalues(out.phi);
  out.lambda_min = ev(0);
  out.lambda_max = ev(n - 1);
  if (out.lambda_min <= kRankTol * std::max(1.0, out.lambda_max)) {
    throw SingularCorrelationError(
        "correlation matrix is numerically singular; condition number +inf");
  }
  out.cond = out.lambda_max / out.lambda_min;
  return out;
}

GaussianClassSpec::GaussianClassSpec(double r1_in, double r2_in,
                                     Eigen::VectorXd x_in)
    : r1(r1_in), r2(r2_in), x(std::move(x_in)) {
  if (!(r1 > 0.0)) throw std::invalid_argument("r1 must be positive");
  if (!(r2 > 1.0)) throw std::invalid_argument("r2 must exceed 1");
  if (x.size() < 2) throw std::invalid_argument("dataset needs n >= 2");
}

FiniteBelief posterior_update(const FiniteBelief& prior,
                              const FiniteMechanism& mech, int output_index) {
  if (!(prior.universe() == mech.universe())) {
    throw IndexMismatchError("prior and mechanism universes differ");
  }
  if (output_index < 0 || output_index >= mech.n_outputs()) {
    throw std::invalid_argument("output index out of range");
  }
  Eigen::VectorXd unnorm(prior.size());
  double marginal = 0.0;
  for (int z = 0; z < prior.size(); ++z) {
    unnorm(z) = prior.prob(z) * mech.prob(z, output_index);
    marginal += unnorm(z);
  }
  if (marginal <= 0.0) {
    throw ZeroEvidenceError("output '" +
                            mech.alphabet()[output_index] +
                            "' has zero marginal probability under the prior");
  }
  return FiniteBelief(prior.universe(), unnorm / marginal);
}

GaussianBelief gaussian_condition_on_average(const GaussianBelief& prior,
                                             double xbar) {
  const int n = prior.dim();
  if (n < 2) throw std::invalid_argument("conditioning needs n >= 2");
  if (!prior.full_rank()) {
    throw DegenerateInputError("prior covariance must be full rank");
  }
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
  const Eigen::VectorXd cov_u = prior.cov() * u;
  const double var_avg = u.dot(cov_u);
  const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                          prior.cov(), Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .maxCoeff();
  if (var_avg <= kRankTol * std::max(1.0, lmax)) {
    throw DegenerateInputError(
        "prior already determines the average (u' cov u is numerically zero)");
  }
  const double mu_bar = prior.mean().mean();
  Eigen::VectorXd mean = prior.mean() + cov_u * ((xbar - mu_bar) / var_avg);
  Eigen::MatrixXd cov = prior.cov() - (cov_u * cov_u.transpose()) / var_avg;
  return GaussianBelief(std::move(mean), std::move(cov));
}

ClassMembershipReport in_gaussian_class(const GaussianBelief& prior,
                                        const GaussianClassSpec& spec) {
  if (prior.dim() != spec.dim()) {
    throw std::invalid_argument("prior dimension does not match the class");
  }
  if (!prior.full_rank()) {
    throw DegenerateInputError("class membership needs a full-rank prior");
  }
  ClassMembershipReport report;
  const int n = prior.dim();
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
  const double var_avg = u.dot(prior.cov() * u);
  const double diff = spec.xbar() - prior.mean().mean();
  report.mean_term = diff * diff / var_avg;
  report.mean_slack = spec.r1 - report.mean_term;

  double cond;
  Eigen::VectorXd sigma(n);
  try {
    const CorrelationDecomposition dec = correlation_decompose(prior.cov());
    cond = dec.cond;
    sigma = dec.sigma;
  } catch (const SingularCorrelationError&) {
    report.cond = std::numeric_limits<double>::infinity();
    report.corr_slack = -std::numeric_limits<double>::infinity();
    report.member = false;
    return report;
  }
  report.cond = cond;
  const double total = sigma.squaredNorm();
  report.corr_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double slack = spec.r2 * (1.0 - sigma(i) * sigma(i) / total) - cond;
    if (slack < report.corr_slack) {
      report.corr_slack = slack;
      report.worst_coordinate = i;
    }
  }
  report.member = report.mean_slack >= 0.0 && report.corr_slack >= 0.0;
  return report;
}

std::vector<GaussianBelief> sample_gaussian_class(const GaussianClassSpec& spec,
                                                  std::uint64_t seed, int count,
                                                  int attempt_budget) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  const int n = spec.dim();
  std::vector<std::optional<GaussianBelief>> slots(count);
  // Each sample draws from its own seeded stream, so the result is the same
  // for any thread count.
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    bool accepted = false;
    for (int attempt = 0; attempt < attempt_budget && !accepted; ++attempt) {
      // Correlation: normalized random PSD, or exactly the identity.
      Eigen::MatrixXd phi;
      if (unif(rng) < 0.25) {
        phi = Eigen::MatrixXd::Identity(n, n);
      } else {
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
        }
        const double jitter = std::exp(std::log(0.05) +
                                       unif(rng) * (std::log(20.0) -
                                                    std::log(0.05)));
        Eigen::MatrixXd w =
            a * a.transpose() + jitter * Eigen::MatrixXd::Identity(n, n);
        phi.resize(n, n);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            phi(i, j) = i == j ? 1.0
                               : w(i, j) / std::sqrt(w(i, i) * w(j, j));
          }
        }
      }
      // Marginal deviations: log-uniform, or all equal.
      Eigen::VectorXd sigma(n);
      if (unif(rng) < 0.25) {
        sigma.setConstant(std::exp(-1.2 + 2.4 * unif(rng)));
      } else {
        for (int i = 0; i < n; ++i) sigma(i) = std::exp(-1.2 + 2.4 * unif(rng));
      }
      Eigen::MatrixXd cov = sigma.asDiagonal() * phi * sigma.asDiagonal();
      cov = ((cov + cov.transpose()) / 2.0).eval();

      // Mean: random draw shifted so the average-guess condition holds.
      const Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
      const double var_avg = u.dot(cov * u);
      Eigen::VectorXd mean(n);
      for (int i = 0; i < n; ++i) mean(i) = normal(rng);
      const double target = std::sqrt(spec.r1) * (2.0 * unif(rng) - 1.0);
      mean.array() += spec.xbar() - target * std::sqrt(var_avg) - mean.mean();

      GaussianBelief candidate(std::move(mean), std::move(cov));
      if (!candidate.full_rank()) continue;
      if (in_gaussian_class(candidate, spec).member) {
        slots[k] = std::move(candidate);
        accepted = true;
      }
    }
    if (!accepted) {
      throw SamplingExhaustedError(
          "class sampler exhausted " + std::to_string(attempt_budget) +
          " attempts for sample " + std::to_string(k) +
          "; the class may be empty or near-degenerate");
    }
  });
  std::vector<GaussianBelief> out;
  out.reserve(count);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

}  // namespace ppcert
