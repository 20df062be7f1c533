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

#ifndef PPCERT_EXTENDED_REAL_HPP_
#define PPCERT_EXTENDED_REAL_HPP_

#include <cassert>
#include <cmath>
#include <compare>
#include <limits>

namespace ppcert {

// A real number extended with +/-infinity. Scores may be infinite (a zero
// probability under a log score), so score arithmetic is centralized here.
// NaN is never a valid value.
class ExtendedReal {
 public:
  constexpr ExtendedReal() : v_(0.0) {}
  // Implicit: finite doubles and IEEE infinities are both valid states.
  constexpr ExtendedReal(double v) : v_(v) { assert(!std::isnan(v)); }

  static constexpr ExtendedReal infinity() {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }
  static constexpr ExtendedReal neg_infinity() {
    return ExtendedReal(-std::numeric_limits<double>::infinity());
  }

  constexpr double value() const { return v_; }
  bool is_finite() const { return std::isfinite(v_); }
  bool is_pos_infinity() const {
    return v_ == std::numeric_limits<double>::infinity();
  }
  bool is_neg_infinity() const {
    return v_ == -std::numeric_limits<double>::infinity();
  }

  friend constexpr auto operator<=>(ExtendedReal a, ExtendedReal b) {
    return a.v_ <=> b.v_;
  }
  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) {
    return a.v_ == b.v_;
  }

 private:
  double v_;
};

// Difference a - b under the relative-score convention: equal infinities
// cancel to exactly zero. A belief with no mass on the truth scores +inf both
// before and after updating, and contributes no privacy change.
inline ExtendedReal score_diff(ExtendedReal a, ExtendedReal b) {
  if ((a.is_pos_infinity() && b.is_pos_infinity()) ||
      (a.is_neg_infinity() && b.is_neg_infinity())) {
    return ExtendedReal(0.0);
  }
  return ExtendedReal(a.value() - b.value());
}

}  // namespace ppcert

#endif  // PPCERT_EXTENDED_REAL_HPP_
