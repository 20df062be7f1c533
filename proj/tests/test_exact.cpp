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

#include "ppcert/exact.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace ppcert {
namespace {

TEST(Rational, EveryFiniteDoubleRoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(unif(rng), i % 80 - 40);
    EXPECT_EQ(static_cast<double>(to_rational(v)), v);
  }
  EXPECT_EQ(to_rational(0.0), Rational(0));
  EXPECT_EQ(to_rational(0.75), Rational(3, 4));
  EXPECT_EQ(to_rational(-2.5), Rational(-5, 2));
  EXPECT_THROW(to_rational(std::numeric_limits<double>::infinity()),
               std::invalid_argument);
}

TEST(RatioLeq, ExactResolutionInsideTheBoundaryBand) {
  const LogThreshold eps = LogThreshold::log_of_rational(3, 1);
  // Exactly at the boundary: 0.75 = 3 * 0.25 as rationals, so <= holds even
  // though exp(log 3) * 0.25 lands one ulp high in doubles.
  EXPECT_TRUE(ratio_leq(0.75, 0.25, eps));
  // One ulp above the boundary: inside the double band, but the rationals
  // decide strictly greater.
  const double above = std::nextafter(0.75, 1.0);
  EXPECT_FALSE(ratio_leq(above, 0.25, eps));
  // One ulp below: compliant.
  EXPECT_TRUE(ratio_leq(std::nextafter(0.75, 0.0), 0.25, eps));
  // Far from the boundary the double path decides alone.
  EXPECT_TRUE(ratio_leq(0.5, 0.25, eps));
  EXPECT_FALSE(ratio_leq(0.9, 0.25, eps));
  // Zero denominators: only a zero numerator complies.
  EXPECT_FALSE(ratio_leq(0.1, 0.0, eps));
  EXPECT_TRUE(ratio_leq(0.0, 0.0, eps));
}

TEST(RatioLeq, BandedTieWithoutExactFormCountsAsEqual) {
  // No rational form available: a one-ulp overshoot inside the band resolves
  // as equality, keeping the non-strict criterion stable under rounding.
  const LogThreshold eps(std::log(3.0));
  EXPECT_TRUE(ratio_leq(std::nextafter(0.75, 1.0), 0.25, eps));
  EXPECT_FALSE(ratio_leq(0.7501, 0.25, eps));
}

TEST(TwoPointRatioLeq, MatchesTheMixtureBoundaryExactly) {
  const LogThreshold eps = LogThreshold::log_of_rational(2, 1);
  // a <= 2 (w a + (1 - w) b) at w = 1/4, a = 1/2, b = 3/16:
  // rhs = 2 (1/8 + 9/64) = 17/32 > 1/2.
  EXPECT_TRUE(two_point_ratio_leq(0.5, 0.1875, 0.25, eps));
  // Boundary case: b = 1/8 gives rhs = 2 (1/8 + 3/32) = 7/16 < 1/2.
  EXPECT_FALSE(two_point_ratio_leq(0.5, 0.125, 0.25, eps));
  // Exact equality: w = 1/2 and b = 0 give rhs = 2 * (a/2) = a.
  EXPECT_TRUE(two_point_ratio_leq(0.5, 0.0, 0.5, eps));
  // Nudging the weight one ulp below 1/2 puts the comparison inside the
  // double band but strictly above the boundary as rationals.
  EXPECT_FALSE(
      two_point_ratio_leq(0.5, 0.0, 0.5 - std::ldexp(1.0, -53), eps));
}

TEST(LogLeq, InfinitiesAndBand) {
  const LogThreshold kappa(1.0);
  EXPECT_TRUE(log_leq(-std::numeric_limits<double>::infinity(), kappa));
  EXPECT_FALSE(log_leq(std::numeric_limits<double>::infinity(), kappa));
  EXPECT_TRUE(log_leq(1.0 + 1e-14, kappa));
  EXPECT_FALSE(log_leq(1.0 + 1e-9, kappa));
  EXPECT_TRUE(log_leq(0.3, kappa));
}

TEST(LogThreshold, BudgetsAddAndExponentialsMultiply) {
  const LogThreshold a = LogThreshold::log_of_rational(3, 2);
  const LogThreshold b = LogThreshold::log_of_rational(2, 1);
  const LogThreshold sum = a + b;
  EXPECT_NEAR(sum.log_value(), std::log(3.0), 1e-15);
  ASSERT_TRUE(sum.exp_exact().has_value());
  EXPECT_EQ(*sum.exp_exact(), Rational(3));
  const LogThreshold plain = a + LogThreshold(0.5);
  EXPECT_FALSE(plain.exp_exact().has_value());
  EXPECT_THROW(LogThreshold::log_of_rational(0, 1), std::invalid_argument);
  EXPECT_THROW(LogThreshold::log_of_rational(2, -1), std::invalid_argument);
}

}  // namespace
}  // namespace ppcert
