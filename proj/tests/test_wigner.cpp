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

#include <doctest.h>

#include <cmath>

#include "homodyne/wigner.hpp"
#include "reference_oracles.hpp"

using namespace homodyne;

TEST_CASE("oracle at tiny dimensions") {
  const Eigen::MatrixXd d0 = wigner_d_oracle(0);
  CHECK(d0.rows() == 1);
  CHECK(d0(0, 0) == doctest::Approx(1.0));

  // spin-1/2 rotation by pi/4 in the ascending-m basis
  const Eigen::MatrixXd d1 = wigner_d_oracle(1);
  const double c = 1.0 / std::sqrt(2.0);
  CHECK(d1(0, 0) == doctest::Approx(c).epsilon(1e-14));
  CHECK(d1(1, 1) == doctest::Approx(c).epsilon(1e-14));
  CHECK(d1(0, 1) == doctest::Approx(c).epsilon(1e-14));
  CHECK(d1(1, 0) == doctest::Approx(-c).epsilon(1e-14));
}

TEST_CASE("oracle matrices are orthogonal") {
  for (int two_j : {4, 11, 20, 40}) {
    const Eigen::MatrixXd d = wigner_d_oracle(two_j);
    const Eigen::MatrixXd gram = d.transpose() * d;
    const Eigen::MatrixXd identity =
        Eigen::MatrixXd::Identity(two_j + 1, two_j + 1);
    CHECK((gram - identity).cwiseAbs().maxCoeff() <= 1e-10);
  }
  CHECK_THROWS_AS(wigner_d_oracle(42), std::invalid_argument);
}

TEST_CASE("recursion column fixed values") {
  const auto trivial = wigner_d_pi2<double>(0, 0);
  CHECK(trivial.values.size() == 1);
  CHECK(trivial.values[0] == doctest::Approx(1.0));

  // d^{1/2}_{1/2,1/2}(pi/2) = cos(pi/4)
  const auto half = wigner_d_pi2<double>(1, 1);
  CHECK(half.at_two_m_prime(1) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

  // d^1_{0,0}(pi/2) = cos(pi/2) = 0
  const auto one = wigner_d_pi2<double>(2, 0);
  CHECK(one.at_two_m_prime(0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("recursion argument validation") {
  CHECK_THROWS_AS(wigner_d_pi2<double>(-2, 0), std::invalid_argument);
  CHECK_THROWS_AS(wigner_d_pi2<double>(4, 6), std::invalid_argument);
  CHECK_THROWS_AS(wigner_d_pi2<double>(4, 1), std::invalid_argument);  // parity
  const auto column = wigner_d_pi2<double>(4, 2);
  CHECK_THROWS_AS(column.at_two_m_prime(3), std::out_of_range);
}

TEST_CASE("recursion agrees with the dense oracle entrywise") {
  double worst = 0.0;
  for (int two_j = 0; two_j <= 40; ++two_j) {
    const Eigen::MatrixXd reference = wigner_d_oracle(two_j);
    for (int col = 0; col <= two_j; ++col) {
      const auto column = wigner_d_pi2<double>(two_j, -two_j + 2 * col);
      worst = std::max(
          worst, (column.values - reference.col(col)).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("transpose symmetry d_{m',m} = (-1)^{m-m'} d_{m,m'}") {
  for (int two_j : {7, 16, 33}) {
    const Eigen::MatrixXd d = wigner_d_oracle(two_j);
    for (int r = 0; r <= two_j; ++r) {
      for (int c = 0; c <= two_j; ++c) {
        const int sign = (((c - r) % 2) == 0) ? 1 : -1;
        CHECK(d(r, c) == doctest::Approx(sign * d(c, r)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("column unitarity far beyond the oracle range") {
  for (int two_j : {100, 250, 600}) {
    for (int two_m_lower : {0, 2, two_j / 2, two_j - 2, two_j}) {
      const int aligned =
          (two_m_lower % 2 == two_j % 2) ? two_m_lower : two_m_lower + 1;
      const auto column = wigner_d_pi2<double>(two_j, aligned);
      CHECK(std::abs(column.values.squaredNorm() - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("large-j column against the extended-precision sum") {
  // the spec-sized probe: two_j = 400 with lower index 388
  const auto column = wigner_d_pi2<double>(400, 388);
  for (int two_mp = -400; two_mp <= 400; two_mp += 50) {
    const long double reference =
        reference::wigner_d_sum(400, two_mp, 388, 1.5707963267948966192L);
    CHECK(std::abs(column.at_two_m_prime(two_mp) - double(reference)) <=
          1e-9);
  }
  // near-edge entries of a deep-tail column; further in, the alternating
  // reference sum loses too many digits to cancellation to serve as a check
  const auto tail_column = wigner_d_pi2<double>(444, 210);
  for (int two_mp : {444, 438, 432, 426, 420}) {
    const long double reference =
        reference::wigner_d_sum(444, two_mp, 210, 1.5707963267948966192L);
    CHECK(std::abs(tail_column.at_two_m_prime(two_mp) - double(reference)) <=
          1e-9 * std::abs(double(reference)) + 1e-17);
  }
}

TEST_CASE("asymptotic form fixed points") {
  // n = 0 at the center: j^{-1/4} u_0(0)
  const double expected = std::pow(200.0, -0.25) * std::pow(M_PI, -0.25);
  CHECK(wigner_d_asymptotic(400, 0, 0) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(wigner_d_asymptotic(400, 0, 1) == 0.0);  // u_1(0) = 0
  CHECK_THROWS_AS(wigner_d_asymptotic(0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(wigner_d_asymptotic(400, 402, 0), std::invalid_argument);
}

TEST_CASE("asymptotic form tracks the exact column") {
  const int two_j = 400;
  // spec-pinned spot check: m = 10, n = 4 within 2% relative
  {
    const auto column = wigner_d_pi2<double>(two_j, 20);
    const int n = 4;
    const int parity = ((two_j - 2 * n - 20) / 2) % 2;
    const double exact =
        (parity ? -1.0 : 1.0) * column.values[two_j - n];
    const double approx = wigner_d_asymptotic(two_j, 20, n);
    CHECK(std::abs(approx - exact) <= 0.02 * std::abs(exact));
  }

  // relative error shrinks as |m|/j -> 0 (checked on the worst n <= 6)
  double worst_by_m[3] = {0.0, 0.0, 0.0};
  const int two_m_values[3] = {40, 20, 8};
  for (int idx = 0; idx < 3; ++idx) {
    const int two_mp = two_m_values[idx];
    const auto column = wigner_d_pi2<double>(two_j, two_mp);
    for (int n = 0; n <= 6; ++n) {
      const int parity = ((two_j - 2 * n - two_mp) / 2) % 2;
      const double exact =
          (parity ? -1.0 : 1.0) * column.values[two_j - n];
      if (std::abs(exact) < 1e-6) continue;  // skip near-nodes
      const double approx = wigner_d_asymptotic(two_j, two_mp, n);
      worst_by_m[idx] = std::max(
          worst_by_m[idx], std::abs(approx - exact) / std::abs(exact));
    }
  }
  CHECK(worst_by_m[1] < worst_by_m[0]);
  CHECK(worst_by_m[2] < worst_by_m[1]);

  // the arcsin argument is the better pre-approximation
  const auto column = wigner_d_pi2<double>(two_j, 40);
  const double exact = column.values[two_j - 4];
  const double with_arcsin = wigner_d_asymptotic(two_j, 40, 4, false);
  const double with_linear = wigner_d_asymptotic(two_j, 40, 4, true);
  CHECK(std::abs(with_arcsin - exact) <= std::abs(with_linear - exact));
}

TEST_CASE("seed fault injection shifts the column") {
  testing::set_wigner_seed_perturbation(1e-6);
  const auto corrupted = wigner_d_pi2<double>(40, 0);
  testing::set_wigner_seed_perturbation(0.0);
  const auto clean = wigner_d_pi2<double>(40, 0);
  CHECK(std::abs(corrupted.values.squaredNorm() - 1.0) > 1e-10);
  CHECK(std::abs(clean.values.squaredNorm() - 1.0) <= 1e-12);
}
