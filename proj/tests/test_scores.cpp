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

#include "ppcert/scores.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ppcert/errors.hpp"
#include "ppcert/generators.hpp"

namespace ppcert {
namespace {

TEST(ExtendedRealArithmetic, EqualInfinitiesCancel) {
  EXPECT_EQ(score_diff(ExtendedReal::infinity(), ExtendedReal::infinity()),
            ExtendedReal(0.0));
  EXPECT_EQ(
      score_diff(ExtendedReal::neg_infinity(), ExtendedReal::neg_infinity()),
      ExtendedReal(0.0));
  EXPECT_TRUE(
      score_diff(ExtendedReal::infinity(), ExtendedReal(1.0)).is_pos_infinity());
  EXPECT_TRUE(score_diff(ExtendedReal(1.0), ExtendedReal::infinity())
                  .is_neg_infinity());
  EXPECT_DOUBLE_EQ(score_diff(ExtendedReal(3.0), ExtendedReal(1.0)).value(),
                   2.0);
}

TEST(BayesAct, TwoCaseExpectation) {
  const Universe u({"a", "b"});
  const PrivacyFunction rho = zero_one_privacy_function(u);
  const FiniteBelief belief(u, Eigen::Vector2d(0.7, 0.3));
  EXPECT_EQ(bayes_act(rho, belief), 0);
}

TEST(BayesAct, PointMassPicksTheColumnMinimizer) {
  std::mt19937_64 rng(2);
  const Universe u = scalar_universe({0, 1, 2});
  const PrivacyFunction rho = random_privacy_function(rng, 4, u);
  for (int x = 0; x < 3; ++x) {
    const int act = bayes_act(rho, FiniteBelief::point_mass(u, x));
    for (int d = 0; d < 4; ++d) {
      EXPECT_LE(rho.rho(act, x), rho.rho(d, x) + 1e-15);
    }
  }
}

TEST(BayesAct, ConstantTableTieBreaksToLowestIndex) {
  const Universe u({"a", "b"});
  const PrivacyFunction rho({"d0", "d1", "d2"}, u,
                            Eigen::MatrixXd::Constant(3, 2, 0.4));
  EXPECT_EQ(bayes_act(rho, FiniteBelief::uniform(u)), 0);
}

TEST(BayesAct, InvariantUnderDatasetDependentShift) {
  std::mt19937_64 rng(4);
  const Universe u = scalar_universe({0, 1, 2, 3});
  for (int i = 0; i < 100; ++i) {
    const PrivacyFunction rho = random_privacy_function(rng, 5, u);
    Eigen::MatrixXd shifted = rho.rho;
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int x = 0; x < u.size(); ++x) {
      const double c = unif(rng);
      for (int d = 0; d < 5; ++d) shifted(d, x) += c;
    }
    const PrivacyFunction rho_shifted(rho.decisions, u, shifted);
    const FiniteBelief belief = random_belief(rng, u);
    EXPECT_EQ(bayes_act(rho, belief), bayes_act(rho_shifted, belief));
  }
}

TEST(ScoreFromLoss, ZeroOneLossGivesModeScore) {
  std::mt19937_64 rng(6);
  const Universe u = scalar_universe({0, 1, 2, 3});
  const LossInducedScore score = score_from_loss(zero_one_privacy_function(u));
  for (int i = 0; i < 50; ++i) {
    const FiniteBelief belief = random_belief(rng, u);
    int mode = 0;
    for (int z = 1; z < u.size(); ++z) {
      if (belief.prob(z) > belief.prob(mode)) mode = z;
    }
    for (int x = 0; x < u.size(); ++x) {
      EXPECT_EQ(score(belief, x).value(), x == mode ? 0.0 : 1.0);
    }
  }
}

TEST(ScoreFromLoss, DiscretizedIntervalLossMatchesIntervalScore) {
  std::mt19937_64 rng(8);
  const double s = 2.0;
  const Universe u = scalar_universe({0, 1, 2, 3, 4});
  // Decisions: length-s windows anchored at every universe point, ordered by
  // center. Agreement is asserted wherever the best window is unique; on
  // mass ties the two tie-break rules may pick different equal-mass windows
  // (uniqueness of the maximizer is the standing assumption of the rule).
  std::vector<double> centers;
  for (int i = 0; i < u.size(); ++i) centers.push_back(u.scalar(i) + s / 2);
  const PrivacyFunction table = interval_privacy_function(u, s, centers);
  const LossInducedScore bridged = score_from_loss(table);
  const ScoringRule direct = IntervalRule{s};
  int untied = 0;
  for (int i = 0; i < 200; ++i) {
    const FiniteBelief belief = random_belief(rng, u, 256, 0.3);
    ExtendedReal best = ExtendedReal::infinity();
    int ties = 0;
    for (int d = 0; d < table.n_decisions(); ++d) {
      const ExtendedReal loss = expected_loss(table, d, belief);
      if (loss.value() < best.value() - 1e-12) {
        best = loss;
        ties = 1;
      } else if (std::abs(loss.value() - best.value()) <= 1e-12) {
        ++ties;
      }
    }
    if (ties > 1) continue;
    ++untied;
    for (int x = 0; x < u.size(); ++x) {
      EXPECT_EQ(bridged(belief, x).value(), evaluate(direct, belief, x).value())
          << "belief " << belief.probs().transpose() << " at x=" << x;
    }
  }
  EXPECT_GT(untied, 140);
}

TEST(ScoreFromLoss, PointMassScoresTheColumnMinimum) {
  std::mt19937_64 rng(10);
  const Universe u = scalar_universe({0, 1, 2});
  const PrivacyFunction rho = random_privacy_function(rng, 4, u);
  const LossInducedScore score = score_from_loss(rho);
  for (int x = 0; x < 3; ++x) {
    EXPECT_DOUBLE_EQ(score(FiniteBelief::point_mass(u, x), x).value(),
                     rho.rho.col(x).minCoeff());
  }
}

TEST(LossFromScore, RoundTripOnNegLogProbFamily) {
  const Universe u = scalar_universe({0, 1, 2});
  std::vector<FiniteBelief> family = {
      FiniteBelief(u, Eigen::Vector3d(0.5, 0.25, 0.25)),
      FiniteBelief(u, Eigen::Vector3d(0.125, 0.75, 0.125)),
      FiniteBelief(u, Eigen::Vector3d(0.25, 0.25, 0.5)),
  };
  const ScoringRule rule = NegLogProbRule{};
  const LossInducedScore rebuilt =
      score_from_loss(loss_from_score(rule, family));
  for (const auto& belief : family) {
    for (int x = 0; x < u.size(); ++x) {
      EXPECT_NEAR(rebuilt(belief, x).value(),
                  evaluate(rule, belief, x).value(), 1e-9);
    }
  }
}

TEST(LossFromScore, ProprietyMakesOwnBeliefTheBayesAct) {
  std::mt19937_64 rng(12);
  const Universe u = scalar_universe({0, 1, 2, 3});
  std::vector<FiniteBelief> family;
  for (int i = 0; i < 6; ++i) family.push_back(random_belief(rng, u));
  const PrivacyFunction bridged = loss_from_score(NegLogProbRule{}, family);
  for (std::size_t q = 0; q < family.size(); ++q) {
    EXPECT_EQ(bayes_act(bridged, family[q]), static_cast<int>(q));
  }
}

TEST(LossFromScore, DominatingBeliefWinsEverywhere) {
  // Window length 12 covers the whole range from anchor 0, so the first
  // belief scores 0 at every dataset while the second misses x = 0.
  const Universe u = scalar_universe({0, 10});
  std::vector<FiniteBelief> family = {
      FiniteBelief(u, Eigen::Vector2d(0.5, 0.5)),
      FiniteBelief(u, Eigen::Vector2d(0.0, 1.0)),
  };
  const PrivacyFunction bridged = loss_from_score(IntervalRule{12.0}, family);
  EXPECT_DOUBLE_EQ(bridged.rho(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(bridged.rho(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(bridged.rho(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(bridged.rho(1, 1), 0.0);
  std::mt19937_64 rng(14);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(bayes_act(bridged, random_belief(rng, u)), 0);
  }
}

TEST(Evaluate, MarginalMomentScoreValues) {
  const GaussianBelief standard(Eigen::VectorXd::Zero(1),
                                Eigen::MatrixXd::Identity(1, 1));
  EXPECT_DOUBLE_EQ(
      evaluate(ScoringRule(MarginalDssRule{1}), standard,
               Eigen::VectorXd::Zero(1))
          .value(),
      0.0);
  EXPECT_DOUBLE_EQ(
      evaluate(ScoringRule(MarginalDssRule{1}), standard,
               Eigen::VectorXd::Constant(1, 2.0))
          .value(),
      4.0);
}

TEST(Evaluate, NegLogProbValues) {
  const Universe u = scalar_universe({0, 1, 2});
  const FiniteBelief uniform2(u, Eigen::Vector3d(0.5, 0.5, 0.0));
  EXPECT_NEAR(evaluate(ScoringRule(NegLogProbRule{}), uniform2, 0).value(),
              std::log(2.0), 1e-15);
  EXPECT_TRUE(
      evaluate(ScoringRule(NegLogProbRule{}), uniform2, 2).is_pos_infinity());
}

TEST(Evaluate, IntervalWindowCentersAtTheMedianOfSymmetricBeliefs) {
  const Universe u = scalar_universe({-2, -1, 0, 1, 2});
  Eigen::VectorXd probs(5);
  probs << 0.1, 0.2, 0.4, 0.2, 0.1;
  const FiniteBelief belief(u, probs);
  const IntervalWindow w = best_window(belief, 2.0);
  EXPECT_DOUBLE_EQ(w.left, -1.0);  // window [-1, 1], centered at the median 0
  EXPECT_DOUBLE_EQ(w.mass, 0.8);
  // Dataset value 2 falls outside the window, value 1 sits on its edge.
  EXPECT_DOUBLE_EQ(evaluate(ScoringRule(IntervalRule{2.0}), belief, 4).value(),
                   1.0);
  EXPECT_DOUBLE_EQ(evaluate(ScoringRule(IntervalRule{2.0}), belief, 3).value(),
                   0.0);
}

TEST(Evaluate, BestWindowBeatsExhaustiveScan) {
  std::mt19937_64 rng(16);
  const Universe u = scalar_universe({0.0, 0.7, 1.3, 2.9, 4.2, 5.0});
  for (int i = 0; i < 200; ++i) {
    const FiniteBelief belief = random_belief(rng, u, 256, 0.3);
    for (double s : {0.5, 1.0, 2.5}) {
      const IntervalWindow w = best_window(belief, s);
      std::vector<double> points, probs;
      for (int z = 0; z < u.size(); ++z) {
        points.push_back(u.scalar(z));
        probs.push_back(belief.prob(z));
      }
      const double best =
          oracles::exhaustive_window_mass(points, probs, s, 4000);
      EXPECT_NEAR(w.mass, best, 1e-12);
    }
  }
}

TEST(Evaluate, DssUndefinedOnZeroVariance) {
  const GaussianBelief flat(Eigen::VectorXd::Zero(2),
                            Eigen::MatrixXd::Zero(2, 2));
  EXPECT_THROW(evaluate(ScoringRule(MarginalDssRule{1}), flat,
                        Eigen::VectorXd::Zero(2)),
               UndefinedMomentsError);
}

TEST(ExpectedScore, OwnScoreOfUniformTwoPoint) {
  const Universe u({"a", "b"});
  const FiniteBelief q = FiniteBelief::uniform(u);
  EXPECT_NEAR(
      expected_score(ScoringRule(NegLogProbRule{}), q, q).value(),
      std::log(2.0), 1e-15);
}

TEST(ExpectedScore, DisjointSupportsAreInfinitelyBad) {
  const Universe u({"a", "b"});
  const FiniteBelief p = FiniteBelief::point_mass(u, 0);
  const FiniteBelief q = FiniteBelief::point_mass(u, 1);
  EXPECT_TRUE(
      expected_score(ScoringRule(NegLogProbRule{}), p, q).is_pos_infinity());
}

TEST(ExpectedScore, MomentIdentityAgainstMonteCarlo) {
  const GaussianBelief p(Eigen::VectorXd::Constant(1, 0.3),
                         Eigen::MatrixXd::Constant(1, 1, 2.0));
  const GaussianBelief q(Eigen::VectorXd::Constant(1, -0.5),
                         Eigen::MatrixXd::Constant(1, 1, 0.7));
  const double closed = expected_score(MarginalDssRule{1}, p, q);
  const double expected =
      std::log(2.0) + (0.7 + 0.64) / 2.0;  // log s2(P) + (s2(Q)+dmu^2)/s2(P)
  EXPECT_NEAR(closed, expected, 1e-12);
  const double mc =
      oracles::mc_expected_moment_score(0.3, 2.0, -0.5, 0.7, 400000, 99);
  EXPECT_NEAR(closed, mc, 2e-2);
}

TEST(Propriety, NegLogProbStrictOverRandomFamilies) {
  std::mt19937_64 rng(18);
  const Universe u = scalar_universe({0, 1, 2, 3});
  std::vector<FiniteBelief> family;
  for (int i = 0; i < 40; ++i) {
    family.push_back(random_belief(rng, u, 256, i % 2 ? 0.25 : 0.0));
  }
  const ProprietyReport report =
      propriety_check(ScoringRule(NegLogProbRule{}), family);
  EXPECT_TRUE(report.pass) << report.detail;
  EXPECT_TRUE(report.strict_required);
}

TEST(Propriety, MomentScoreTiesOnMatchingMoments) {
  std::mt19937_64 rng(20);
  std::vector<GaussianBelief> family;
  for (int i = 0; i < 40; ++i) family.push_back(random_gaussian(rng, 2));
  const ProprietyReport report = propriety_check(MarginalDssRule{1}, family);
  EXPECT_TRUE(report.pass) << report.detail;
  // Distinct beliefs with equal first two moments tie exactly.
  Eigen::MatrixXd cov1 = Eigen::Matrix2d::Identity();
  Eigen::MatrixXd cov2 = Eigen::Matrix2d::Identity();
  cov2(0, 1) = cov2(1, 0) = 0.5;
  const GaussianBelief a(Eigen::Vector2d(0, 0), cov1);
  const GaussianBelief b(Eigen::Vector2d(0, 0), cov2);
  EXPECT_DOUBLE_EQ(expected_score(MarginalDssRule{1}, a, b),
                   expected_score(MarginalDssRule{1}, b, b));
}

TEST(Propriety, SignFlippedLogScoreFailsWithWitness) {
  std::mt19937_64 rng(22);
  const Universe u = scalar_universe({0, 1, 2});
  std::vector<FiniteBelief> family;
  for (int i = 0; i < 10; ++i) family.push_back(random_belief(rng, u));
  const ProprietyReport report = propriety_check(
      [](const FiniteBelief& b, int x) {
        return ExtendedReal(std::log(std::max(b.prob(x), 1e-300)));
      },
      family, /*require_strict=*/false);
  EXPECT_FALSE(report.pass);
  EXPECT_TRUE(report.witness.has_value());
  EXPECT_LT(report.worst_gap, 0.0);
}

TEST(WorstCaseLoss, MatchingLossIsNeverBeaten) {
  std::mt19937_64 rng(24);
  const Universe u = scalar_universe({0, 1, 2});
  for (int i = 0; i < 50; ++i) {
    const PrivacyFunction rho = random_privacy_function(rng, 3, u);
    std::vector<PrivacyFunction> alts;
    for (int l = 0; l < 10; ++l) {
      alts.push_back(random_privacy_function(rng, 3, u));
    }
    alts.push_back(rho);
    alts.push_back(PrivacyFunction(rho.decisions, u, -rho.rho));
    std::vector<FiniteBelief> beliefs;
    for (int b = 0; b < 50; ++b) beliefs.push_back(random_belief(rng, u));
    const WorstCaseLossReport report =
        worst_case_loss_check(rho, alts, beliefs);
    EXPECT_TRUE(report.pass) << "gap " << report.worst_gap;
  }
}

TEST(WorstCaseLoss, AdversarialLossIsTypicallyStrictlyWorse) {
  std::mt19937_64 rng(26);
  const Universe u = scalar_universe({0, 1, 2});
  int strict = 0;
  for (int i = 0; i < 50; ++i) {
    const PrivacyFunction rho = random_privacy_function(rng, 4, u);
    const PrivacyFunction flipped(rho.decisions, u, -rho.rho);
    const FiniteBelief belief = random_belief(rng, u);
    const int own = bayes_act(rho, belief);
    const int alt = bayes_act(flipped, belief);
    const double gap = expected_loss(rho, alt, belief).value() -
                       expected_loss(rho, own, belief).value();
    EXPECT_GE(gap, -1e-12);
    if (gap > 1e-9) ++strict;
  }
  EXPECT_GT(strict, 25);
}

}  // namespace
}  // namespace ppcert
