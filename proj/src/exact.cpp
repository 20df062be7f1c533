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

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace ppcert {

Rational to_rational(double v) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument("to_rational requires a finite value");
  }
  // Decompose v = mantissa * 2^exp with integral mantissa.
  int exp = 0;
  double mant = std::frexp(v, &exp);  // |mant| in [0.5, 1)
  for (int i = 0; i < 64 && mant != std::floor(mant); ++i) {
    mant *= 2.0;
    --exp;
  }
  Rational r(static_cast<std::int64_t>(mant));
  if (exp > 0) {
    r *= Rational(boost::multiprecision::pow(
        boost::multiprecision::cpp_int(2), exp));
  } else if (exp < 0) {
    r /= Rational(boost::multiprecision::pow(
        boost::multiprecision::cpp_int(2), -exp));
  }
  return r;
}

LogThreshold LogThreshold::log_of_rational(std::int64_t num, std::int64_t den) {
  if (num <= 0 || den <= 0) {
    throw std::invalid_argument("threshold exponential must be positive");
  }
  LogThreshold t(std::log(static_cast<double>(num) / static_cast<double>(den)));
  t.exp_exact_ = Rational(num, den);
  return t;
}

LogThreshold LogThreshold::log_of_rational(const Rational& r) {
  if (r <= 0) {
    throw std::invalid_argument("threshold exponential must be positive");
  }
  LogThreshold t(std::log(static_cast<double>(r)));
  t.exp_exact_ = r;
  return t;
}

LogThreshold operator+(const LogThreshold& a, const LogThreshold& b) {
  LogThreshold t(a.log_value_ + b.log_value_);
  if (a.exp_exact_ && b.exp_exact_) {
    t.exp_exact_ = *a.exp_exact_ * *b.exp_exact_;
  }
  return t;
}

bool within_boundary_band(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= kBoundaryRelTol * scale;
}

bool ratio_leq(double a, double b, const LogThreshold& t) {
  const double rhs = t.exp_value() * b;
  if (within_boundary_band(a, rhs)) {
    if (t.exp_exact()) {
      return to_rational(a) <= *t.exp_exact() * to_rational(b);
    }
    return true;  // banded tie counts as equality
  }
  return a < rhs;
}

bool log_leq(double delta, const LogThreshold& t) {
  if (delta == -std::numeric_limits<double>::infinity()) return true;
  if (delta == std::numeric_limits<double>::infinity()) return false;
  if (within_boundary_band(delta, t.log_value())) return true;
  return delta < t.log_value();
}

bool two_point_ratio_leq(double a, double b, double w, const LogThreshold& t) {
  const double mix = w * a + (1.0 - w) * b;
  const double rhs = t.exp_value() * mix;
  if (within_boundary_band(a, rhs)) {
    if (t.exp_exact()) {
      const Rational rw = to_rational(w);
      return to_rational(a) <=
             *t.exp_exact() *
                 (rw * to_rational(a) + (Rational(1) - rw) * to_rational(b));
    }
    return true;
  }
  return a < rhs;
}

}  // namespace ppcert
