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

// Test-only reference calculations.  Everything here is deliberately written
// along different routes than the library (direct summation formulas, dense
// linear algebra, extended precision) so agreement is meaningful.

#ifndef HOMODYNE_TESTS_REFERENCE_ORACLES_HPP_
#define HOMODYNE_TESTS_REFERENCE_ORACLES_HPP_

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace reference {

inline long double log_fact(long long n) {
  return std::lgamma(static_cast<long double>(n) + 1.0L);
}

/// ln(n!) by compensated summation of ln(k); independent of lgamma.
inline long double log_factorial_by_summation(long long n) {
  long double sum = 0.0L, carry = 0.0L;
  for (long long k = 2; k <= n; ++k) {
    const long double term = std::log(static_cast<long double>(k));
    const long double y = term - carry;
    const long double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

/// d^j_{m',m}(theta) by the direct sign-alternating factorial sum in
/// extended precision.  Usable wherever the term count stays small or the
/// cancellation stays below ~6 digits.
inline long double wigner_d_sum(int two_j, int two_mp, int two_m,
                                long double theta) {
  const long double j = two_j / 2.0L;
  const long double mp = two_mp / 2.0L;
  const long double m = two_m / 2.0L;
  const long double c = std::cos(theta / 2.0L);
  const long double s = std::sin(theta / 2.0L);
  const int k_min = std::max(0, (two_m - two_mp) / 2);
  const int k_max =
      std::min((two_j + two_m) / 2, (two_j - two_mp) / 2);
  const long double log_pref =
      0.5L * (log_fact((two_j + two_m) / 2) + log_fact((two_j - two_m) / 2) +
              log_fact((two_j + two_mp) / 2) + log_fact((two_j - two_mp) / 2));
  long double total = 0.0L;
  for (int k = k_min; k <= k_max; ++k) {
    const long double log_den =
        log_fact((two_j + two_m) / 2 - k) + log_fact(k) +
        log_fact((two_j - two_mp) / 2 - k) + log_fact(k - (two_m - two_mp) / 2);
    const long double c_pow = 2.0L * j - 2.0L * k + m - mp;
    const long double s_pow = 2.0L * k - m + mp;
    const int sign = ((k + (two_mp - two_m) / 2) % 2 == 0) ? 1 : -1;
    total += sign * std::exp(log_pref - log_den + c_pow * std::log(c) +
                             s_pow * std::log(s));
  }
  return total;
}

/// u_n(x) from the explicit degree-n Hermite polynomial, extended precision.
inline long double hermite_gaussian_polynomial(int n, long double x) {
  // H_k(x) physicists' convention via the raw three-term recursion.
  long double h_prev = 1.0L, h = 2.0L * x;
  if (n == 0) h = 1.0L;
  for (int k = 1; k < n; ++k) {
    const long double h_next = 2.0L * x * h - 2.0L * k * h_prev;
    h_prev = h;
    h = h_next;
  }
  constexpr long double kPi = 3.141592653589793238462643383279502884L;
  const long double log_norm =
      -0.5L * (n * std::log(2.0L) + log_fact(n)) - 0.25L * std::log(kPi);
  return h * std::exp(log_norm - 0.5L * x * x);
}

/// Dense matrix exponential of an anti-Hermitian generator, via the
/// eigendecomposition of its Hermitian counterpart i*X.
inline Eigen::MatrixXcd expm_antihermitian(const Eigen::MatrixXcd& x) {
  const Eigen::MatrixXcd h = std::complex<double>(0, 1) * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  Eigen::VectorXcd phases(h.rows());
  for (int k = 0; k < h.rows(); ++k) {
    phases[k] = std::exp(std::complex<double>(0, -solver.eigenvalues()[k]));
  }
  return solver.eigenvectors() * phases.asDiagonal() *
         solver.eigenvectors().adjoint();
}

/// Fock coefficients of exp[r (a^2 - a^dag^2)/2] |0> on a dense grid.
inline Eigen::VectorXcd squeezed_vacuum_by_expm(double r, int dim) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  const Eigen::MatrixXcd generator = 0.5 * r * (a * a - (a * a).adjoint());
  Eigen::VectorXcd vacuum = Eigen::VectorXcd::Zero(dim);
  vacuum[0] = 1.0;
  return expm_antihermitian(generator) * vacuum;
}

/// Truncated-at-degree-`cap` polynomials in the two commuting bookkeeping
/// symbols (annihilation power r, creation power s), with double
/// coefficients.  exp() of the correction exponent lives on this algebra, so
/// the series-term generator can be checked against an independent route.
struct OrderedPolynomial {
  std::map<std::pair<int, int>, double> coeffs;

  static OrderedPolynomial one() {
    OrderedPolynomial p;
    p.coeffs[{0, 0}] = 1.0;
    return p;
  }

  OrderedPolynomial multiply(const OrderedPolynomial& other, int cap) const {
    OrderedPolynomial out;
    for (const auto& [ab, ca] : coeffs) {
      for (const auto& [cd, cb] : other.coeffs) {
        const int r = ab.first + cd.first;
        const int s = ab.second + cd.second;
        if (r + s > cap) continue;
        out.coeffs[{r, s}] += ca * cb;
      }
    }
    return out;
  }

  OrderedPolynomial scaled(double factor) const {
    OrderedPolynomial out = *this;
    for (auto& [_, c] : out.coeffs) c *= factor;
    return out;
  }

  void add(const OrderedPolynomial& other) {
    for (const auto& [rs, c] : other.coeffs) coeffs[rs] += c;
  }
};

/// Correction exponent evaluated at numeric (two_j, two_m, A), as a
/// polynomial over (r, s) truncated at total degree `cap`.
inline OrderedPolynomial correction_exponent(int two_j, int two_m, double A,
                                             int cap) {
  OrderedPolynomial e;
  const double a2 = A * A;
  for (int p = 2; p <= cap; ++p) {
    double c;
    if (p == 2) {
      c = -(two_j - a2) / (2.0 * a2);
    } else if (p % 2 == 1) {
      c = two_m / (p * std::pow(A, p));
    } else {
      c = -double(two_j) / (p * std::pow(A, p));
    }
    e.coeffs[{p, 0}] += c;
    e.coeffs[{0, p}] += c;
  }
  return e;
}

/// exp(exponent) on the truncated algebra by plain Taylor summation.
inline OrderedPolynomial exp_truncated(const OrderedPolynomial& exponent,
                                       int cap) {
  OrderedPolynomial result = OrderedPolynomial::one();
  OrderedPolynomial power = OrderedPolynomial::one();
  // monomials have degree >= 2, so degree-cap truncation dies by t = cap/2
  for (int t = 1; t <= cap; ++t) {
    power = power.multiply(exponent, cap).scaled(1.0 / t);
    result.add(power);
  }
  return result;
}

/// Simpson-rule integral of f over [lo, hi] with an even number of panels.
template <typename F>
double simpson(F&& f, double lo, double hi, int panels) {
  const double h = (hi - lo) / panels;
  long double sum = f(lo) + f(hi);
  for (int k = 1; k < panels; ++k) {
    sum += f(lo + k * h) * ((k % 2) ? 4.0 : 2.0);
  }
  return static_cast<double>(sum * h / 3.0L);
}

}  // namespace reference

#endif  // HOMODYNE_TESTS_REFERENCE_ORACLES_HPP_
