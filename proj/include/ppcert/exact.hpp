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

#ifndef PPCERT_EXACT_HPP_
#define PPCERT_EXACT_HPP_

#include <cmath>
#include <cstdint>
#include <optional>

#include <boost/multiprecision/cpp_int.hpp>

namespace ppcert {

using Rational = boost::multiprecision::cpp_rational;

// Exact rational value of a finite double (every finite double is rational).
Rational to_rational(double v);

// Tail and likelihood-ratio comparisons sit against thresholds of the form
// e^kappa. Kernel entries are doubles and therefore exact dyadic rationals;
// whenever kappa is the log of a known rational (all built-in fixtures and
// randomized suites choose levels this way) the comparison can be resolved
// exactly. Doubles are used first; only results inside a 1e-12 relative band
// around the boundary fall back to rational arithmetic, and without an exact
// representation a banded tie resolves as equality.
inline constexpr double kBoundaryRelTol = 1e-12;

class LogThreshold {
 public:
  // Threshold from a plain double level; no exact form available.
  explicit LogThreshold(double log_value)
      : log_value_(log_value), exp_value_(std::exp(log_value)) {}
  // Threshold kappa = log(num/den) with exact e^kappa = num/den.
  static LogThreshold log_of_rational(std::int64_t num, std::int64_t den);
  static LogThreshold log_of_rational(const Rational& r);

  double log_value() const { return log_value_; }
  double exp_value() const { return exp_value_; }
  const std::optional<Rational>& exp_exact() const { return exp_exact_; }

  // Sum of privacy budgets: logs add, exact exponentials multiply.
  friend LogThreshold operator+(const LogThreshold& a, const LogThreshold& b);

 private:
  double log_value_;
  double exp_value_;
  std::optional<Rational> exp_exact_;
};

// Whether |a - b| <= kBoundaryRelTol * max(1, |a|, |b|).
bool within_boundary_band(double a, double b);

// Decides a <= e^t * b for nonnegative a, b (linear space). Exact when t
// carries a rational exponential; a banded tie otherwise counts as <=.
bool ratio_leq(double a, double b, const LogThreshold& t);

// Decides delta <= t.log_value() for a log-space relative score. +/-inf
// compare in the usual order; banded finite ties count as <=.
bool log_leq(double delta, const LogThreshold& t);

// Decides a <= e^t * (w * a + (1 - w) * b): the finite-prior tail event for
// a two-point prior with mass w on the true dataset. Exact when possible.
bool two_point_ratio_leq(double a, double b, double w, const LogThreshold& t);

}  // namespace ppcert

#endif  // PPCERT_EXACT_HPP_
