// Copyright 2026 The homodyne Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HOMODYNE_LOG_WEIGHT_HPP_
#define HOMODYNE_LOG_WEIGHT_HPP_

#include <cmath>
#include <limits>

namespace homodyne {

/// Signed scalar held in the log domain: value = sign * exp(log_magnitude).
///
/// sign == 0 means the value is exactly zero, whatever log_magnitude holds.
/// The log rides in extended precision: near the edges of the double range
/// |log| reaches ~709, where a double-rounded log alone would already cost
/// ~4e-14 in relative value.  Factorial-heavy prefactors travel through this
/// type so that exponentiation happens once, at the final probability.
struct LogWeight {
  long double log_magnitude = -std::numeric_limits<long double>::infinity();
  int sign = 0;

  static LogWeight zero() { return LogWeight{}; }

  static LogWeight from_log(long double log_mag, int s) {
    if (s == 0) return zero();
    return LogWeight{log_mag, s > 0 ? 1 : -1};
  }

  static LogWeight from_value(double v) {
    if (v == 0.0) return zero();
    return LogWeight{std::log(std::abs(static_cast<long double>(v))),
                     v > 0.0 ? 1 : -1};
  }

  double value() const {
    if (sign == 0) return 0.0;
    return static_cast<double>(sign * std::exp(log_magnitude));
  }

  bool is_zero() const { return sign == 0; }

  LogWeight operator*(const LogWeight& other) const {
    if (sign == 0 || other.sign == 0) return zero();
    return LogWeight{log_magnitude + other.log_magnitude, sign * other.sign};
  }

  LogWeight& operator*=(const LogWeight& other) {
    *this = *this * other;
    return *this;
  }

  /// value() * exp(extra_log) without leaving the log domain in between.
  double scaled_value(long double extra_log) const {
    if (sign == 0) return 0.0;
    return static_cast<double>(sign * std::exp(log_magnitude + extra_log));
  }
};

}  // namespace homodyne

#endif  // HOMODYNE_LOG_WEIGHT_HPP_
