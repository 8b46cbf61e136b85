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

#ifndef HOMODYNE_WIGNER_HPP_
#define HOMODYNE_WIGNER_HPP_

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <atomic>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "homodyne/special.hpp"

namespace homodyne {

/// One column of the rotation matrix d^j_{m',m}(pi/2): the lower index m is
/// fixed, values run over the upper index m'.  All half-integer indices cross
/// the interface doubled (two_j = 2j, two_m = 2m).
template <typename Real = double>
struct WignerDColumn {
  int two_j = 0;
  int two_m_lower = 0;
  /// values[i] = d^j_{m', m}(pi/2) with two_m_prime = -two_j + 2*i.
  Eigen::Vector<Real, Eigen::Dynamic> values;

  Real at_two_m_prime(int two_m_prime) const {
    if (std::abs(two_m_prime) > two_j ||
        ((two_m_prime - two_j) % 2) != 0) {
      throw std::out_of_range("WignerDColumn: invalid two_m_prime " +
                              std::to_string(two_m_prime) + " for two_j " +
                              std::to_string(two_j));
    }
    return values[(two_m_prime + two_j) / 2];
  }
};

namespace testing {

/// Relative perturbation applied to the closed-form recursion seeds.  This is
/// a fault-injection hook for the acceptance suite's negative control; it is
/// zero in normal operation.  Set once before any computation starts.
inline std::atomic<double>& wigner_seed_perturbation_storage() {
  static std::atomic<double> value{0.0};
  return value;
}

inline void set_wigner_seed_perturbation(double delta) {
  wigner_seed_perturbation_storage().store(delta);
}

inline double wigner_seed_perturbation() {
  return wigner_seed_perturbation_storage().load();
}

}  // namespace testing

namespace detail {

inline void check_column_args(int two_j, int two_m_lower) {
  if (two_j < 0) {
    throw std::invalid_argument("wigner_d_pi2: two_j must be non-negative");
  }
  if (std::abs(two_m_lower) > two_j) {
    throw std::invalid_argument(
        "wigner_d_pi2: |two_m_lower| = " + std::to_string(two_m_lower) +
        " exceeds two_j = " + std::to_string(two_j));
  }
  if (((two_m_lower - two_j) % 2) != 0) {
    throw std::invalid_argument(
        "wigner_d_pi2: two_m_lower = " + std::to_string(two_m_lower) +
        " and two_j = " + std::to_string(two_j) + " differ in parity");
  }
}

// c_plus(m') = sqrt((j - m')(j + m' + 1)), exact integer products.
template <typename Wide>
Wide ladder_up(int two_j, int two_mp) {
  return std::sqrt(Wide(0.25) * Wide(two_j - two_mp) *
                   Wide(two_j + two_mp + 2));
}

// c_minus(m') = sqrt((j + m')(j - m' + 1)).
template <typename Wide>
Wide ladder_down(int two_j, int two_mp) {
  return std::sqrt(Wide(0.25) * Wide(two_j + two_mp) *
                   Wide(two_j - two_mp + 2));
}

}  // namespace detail

/// d^j_{m',m}(pi/2) for a fixed lower index, accurate in the absolute sense
/// well past two_j = 600.
///
/// The column is the eigenvector of the tridiagonal J_x with eigenvalue m, so
/// at pi/2 the values obey a three-term recursion in m'.  Both edge values
/// have closed forms (binomial square roots, computed in the log domain), and
/// each half of the column is reached by marching inward from its own edge,
/// which keeps the recursion on the growing solution everywhere.  An overall
/// scale factor rides along separately, so huge j cannot underflow the march.
template <typename Real = double>
WignerDColumn<Real> wigner_d_pi2(int two_j, int two_m_lower) {
  detail::check_column_args(two_j, two_m_lower);
  using Wide = detail::widen_t<Real>;

  WignerDColumn<Real> column;
  column.two_j = two_j;
  column.two_m_lower = two_m_lower;
  column.values.resize(two_j + 1);
  if (two_j == 0) {
    column.values[0] = Real(1);
    return column;
  }

  // Both edges share the magnitude sqrt(C(2j, j+m)) * 2^{-j}; the top edge
  // (m' = j) carries the sign (-1)^{j-m}, the bottom edge (m' = -j) is
  // positive.  Signs are slaved to the J_y ladder oracle.
  const long long n_plus = (two_j + two_m_lower) / 2;
  const long long n_minus = (two_j - two_m_lower) / 2;
  Wide seed_log = Wide(0.5) * (log_factorial<Wide>(two_j) -
                               log_factorial<Wide>(n_plus) -
                               log_factorial<Wide>(n_minus)) -
                  Wide(0.5) * Wide(two_j) * std::log(Wide(2));
  const double fault = testing::wigner_seed_perturbation();
  if (fault != 0.0) seed_log += std::log1p(static_cast<Wide>(fault));
  const int top_sign = (n_minus % 2 == 0) ? 1 : -1;

  constexpr Wide kHuge = Wide(1e300);
  constexpr Wide kHugeInv = Wide(1e-300);
  const Wide kLogHuge = std::log(kHuge);
  const Wide two_ml = static_cast<Wide>(two_m_lower);

  const int mid = two_j / 2;
  std::vector<Wide> scaled(static_cast<size_t>(two_j) + 1);
  std::vector<Wide> shift(static_cast<size_t>(two_j) + 1);

  // Top march: m' = j down to the midpoint.
  {
    Wide extra = 0;
    Wide upper = 0;                       // phantom d at m' = j + 1
    Wide cur = static_cast<Wide>(top_sign);  // scaled d at m' = j
    scaled[two_j] = cur;
    shift[two_j] = extra;
    for (int i = two_j; i > mid; --i) {
      const int two_mp = -two_j + 2 * i;
      const Wide down = (two_ml * cur -
                         detail::ladder_up<Wide>(two_j, two_mp) * upper) /
                        detail::ladder_down<Wide>(two_j, two_mp);
      upper = cur;
      cur = down;
      if (std::abs(cur) > kHuge || std::abs(upper) > kHuge) {
        cur *= kHugeInv;
        upper *= kHugeInv;
        extra += kLogHuge;
      }
      scaled[i - 1] = cur;
      shift[i - 1] = extra;
    }
  }

  // Bottom march: m' = -j up to just below the midpoint.
  {
    Wide extra = 0;
    Wide lower = 0;   // phantom d at m' = -j - 1
    Wide cur = 1;     // scaled d at m' = -j, positive edge
    scaled[0] = cur;
    shift[0] = extra;
    for (int i = 0; i + 1 < mid; ++i) {
      const int two_mp = -two_j + 2 * i;
      const Wide up = (two_ml * cur -
                       detail::ladder_down<Wide>(two_j, two_mp) * lower) /
                      detail::ladder_up<Wide>(two_j, two_mp);
      lower = cur;
      cur = up;
      if (std::abs(cur) > kHuge || std::abs(lower) > kHuge) {
        cur *= kHugeInv;
        lower *= kHugeInv;
        extra += kLogHuge;
      }
      scaled[i + 1] = cur;
      shift[i + 1] = extra;
    }
  }

  for (int i = 0; i <= two_j; ++i) {
    const Wide total_log = seed_log + shift[i];
    column.values[i] = (scaled[i] == Wide(0))
                           ? Real(0)
                           : static_cast<Real>(scaled[i] * std::exp(total_log));
  }
  return column;
}

/// Large-j approximation of d^j_{m, j-n}(pi/2):
///   (-1)^n j^{-1/4} u_n(sqrt(j) * asin(m/j)),
/// with the further-simplified argument m/sqrt(j) behind `linear_argument`.
/// Valid for n much smaller than j; accuracy degrades as |m|/j grows.
template <typename Real = double>
Real wigner_d_asymptotic(int two_j, int two_m_prime, int n,
                         bool linear_argument = false) {
  if (two_j <= 0) {
    throw std::invalid_argument("wigner_d_asymptotic: two_j must be positive");
  }
  if (n < 0) {
    throw std::invalid_argument("wigner_d_asymptotic: n must be non-negative");
  }
  if (std::abs(two_m_prime) > two_j) {
    throw std::invalid_argument(
        "wigner_d_asymptotic: |two_m_prime| exceeds two_j");
  }
  const Real j = Real(two_j) / Real(2);
  const Real m = Real(two_m_prime) / Real(2);
  const Real arg = linear_argument ? m / std::sqrt(j)
                                   : std::sqrt(j) * std::asin(m / j);
  const Real sign = (n % 2 == 0) ? Real(1) : Real(-1);
  return sign * std::pow(j, Real(-0.25)) * hermite_gaussian<Real>(n, arg);
}

namespace detail {

/// Dense e^{-i (pi/2) J_y} on the (two_j+1)-dimensional multiplet, by
/// eigendecomposition of the Hermitian J_y built from ladder elements.
/// Rows and columns are ordered by ascending two_m' / two_m.
inline Eigen::MatrixXd bs_rotation_matrix(int two_j) {
  if (two_j < 0) {
    throw std::invalid_argument("bs_rotation_matrix: two_j must be >= 0");
  }
  const int dim = two_j + 1;
  if (dim == 1) return Eigen::MatrixXd::Ones(1, 1);

  using Cplx = std::complex<double>;
  Eigen::MatrixXcd jy = Eigen::MatrixXcd::Zero(dim, dim);
  for (int col = 0; col + 1 < dim; ++col) {
    const int two_m = -two_j + 2 * col;
    const double c_plus = ladder_up<double>(two_j, two_m);
    // <m+1| J_y |m> = c_plus / (2i),  <m-1| J_y |m> = -c_minus / (2i)
    jy(col + 1, col) = Cplx(0.0, -0.5) * c_plus;
    jy(col, col + 1) = Cplx(0.0, 0.5) * c_plus;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(jy);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("bs_rotation_matrix: eigendecomposition failed");
  }
  const double theta = pi_v<double> / 2.0;
  Eigen::VectorXcd phases(dim);
  for (int k = 0; k < dim; ++k) {
    phases[k] = std::exp(Cplx(0.0, -theta * solver.eigenvalues()[k]));
  }
  const Eigen::MatrixXcd rot = solver.eigenvectors() * phases.asDiagonal() *
                               solver.eigenvectors().adjoint();
  return rot.real();
}

}  // namespace detail

/// Brute-force d^j(pi/2) by dense exponentiation of J_y; the ground truth the
/// recursion's sign conventions are slaved to.  Row r, column c hold
/// d^j_{m',m} with two_m_prime = -two_j + 2r and two_m = -two_j + 2c.
inline Eigen::MatrixXd wigner_d_oracle(int two_j) {
  if (two_j > 40) {
    throw std::invalid_argument("wigner_d_oracle: dimension cap exceeded, "
                                "two_j must be <= 40 (got " +
                                std::to_string(two_j) + ")");
  }
  return detail::bs_rotation_matrix(two_j);
}

}  // namespace homodyne

#endif  // HOMODYNE_WIGNER_HPP_
