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

#ifndef HOMODYNE_SPECIAL_HPP_
#define HOMODYNE_SPECIAL_HPP_

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace homodyne {

/// Hard cap on the harmonic-oscillator eigenfunction index.  The recursion is
/// O(n) and stable, the cap only bounds accidental runaway requests.
inline constexpr int kHermiteGaussianCap = 8192;

namespace detail {

// Recursions run in a wider type than they return; on x86-64 long double is
// the 80-bit extended format, which buys ~3 decimal digits of headroom.
template <typename Real>
struct widen {
  using type = long double;
};
template <>
struct widen<float> {
  using type = double;
};
template <typename Real>
using widen_t = typename widen<Real>::type;

template <typename Real>
inline constexpr Real pi_v = std::numbers::pi_v<Real>;

}  // namespace detail

/// Natural log of n!.
template <typename Real = double>
Real log_factorial(long long n) {
  if (n < 0) {
    throw std::invalid_argument("log_factorial: n must be non-negative, got " +
                                std::to_string(n));
  }
  using Wide = detail::widen_t<Real>;
  return static_cast<Real>(std::lgamma(static_cast<Wide>(n) + Wide(1)));
}

/// log of the Poisson pmf: k*ln(mean) - mean - ln(k!).
template <typename Real = double>
Real log_poisson(long long k, Real mean) {
  if (k < 0) {
    throw std::invalid_argument("log_poisson: k must be non-negative");
  }
  if (!(mean > Real(0))) {
    throw std::invalid_argument("log_poisson: mean must be positive");
  }
  using Wide = detail::widen_t<Real>;
  const Wide m = static_cast<Wide>(mean);
  return static_cast<Real>(static_cast<Wide>(k) * std::log(m) - m -
                           std::lgamma(static_cast<Wide>(k) + Wide(1)));
}

namespace detail {

// Core of the orthonormal oscillator-eigenfunction recursion
//   u_{n+1}(x) = x*sqrt(2/(n+1))*u_n(x) - sqrt(n/(n+1))*u_{n-1}(x)
// run on values scaled by exp(-shift) so that a tiny Gaussian seed never
// underflows.  `emit(n, value, shift)` is called once per index in order.
template <typename Real, typename Emit>
void hermite_gaussian_march(int n_max, Real x, Emit&& emit) {
  using Wide = widen_t<Real>;
  constexpr Wide kHuge = Wide(1e300);
  constexpr Wide kHugeInv = Wide(1e-300);
  const Wide kLogHuge = std::log(kHuge);

  const Wide xw = static_cast<Wide>(x);
  // log u_0(x) = -x^2/2 - (1/4) ln pi
  Wide shift = -Wide(0.5) * xw * xw - Wide(0.25) * std::log(pi_v<Wide>);
  Wide prev = 1;  // u_0 / exp(shift)
  emit(0, prev, shift);
  if (n_max == 0) return;

  Wide cur = xw * std::sqrt(Wide(2)) * prev;  // u_1 / exp(shift)
  emit(1, cur, shift);

  for (int k = 1; k < n_max; ++k) {
    const Wide next = xw * std::sqrt(Wide(2) / Wide(k + 1)) * cur -
                      std::sqrt(Wide(k) / Wide(k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kHuge || std::abs(prev) > kHuge) {
      prev *= kHugeInv;
      cur *= kHugeInv;
      shift += kLogHuge;
    }
    emit(k + 1, cur, shift);
  }
}

template <typename Real>
Real combine_scaled(detail::widen_t<Real> value, detail::widen_t<Real> shift) {
  using Wide = detail::widen_t<Real>;
  if (value == Wide(0)) return Real(0);
  return static_cast<Real>(value * std::exp(shift));
}

inline void check_hermite_index(int n) {
  if (n < 0) {
    throw std::invalid_argument("hermite_gaussian: n must be non-negative");
  }
  if (n > kHermiteGaussianCap) {
    throw std::invalid_argument(
        "hermite_gaussian: n = " + std::to_string(n) +
        " exceeds the implementation cap " +
        std::to_string(kHermiteGaussianCap));
  }
}

}  // namespace detail

/// u_n(x) = <x|n> for the number state |n>, with x-hat = (a + a^dag)/sqrt(2).
/// Normalized so that the integral of u_n^2 over the real line is 1.
template <typename Real = double>
Real hermite_gaussian(int n, Real x) {
  detail::check_hermite_index(n);
  Real result = 0;
  detail::hermite_gaussian_march<Real>(
      n, x, [&](int k, detail::widen_t<Real> v, detail::widen_t<Real> s) {
        if (k == n) result = detail::combine_scaled<Real>(v, s);
      });
  return result;
}

/// All of u_0(x) ... u_{n_max}(x) in one pass.
template <typename Real = double>
Eigen::Vector<Real, Eigen::Dynamic> hermite_gaussian_table(int n_max, Real x) {
  detail::check_hermite_index(n_max);
  Eigen::Vector<Real, Eigen::Dynamic> out(n_max + 1);
  detail::hermite_gaussian_march<Real>(
      n_max, x, [&](int k, detail::widen_t<Real> v, detail::widen_t<Real> s) {
        out[k] = detail::combine_scaled<Real>(v, s);
      });
  return out;
}

}  // namespace homodyne

#endif  // HOMODYNE_SPECIAL_HPP_
