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
#include <complex>
#include <random>

#include "homodyne/exact.hpp"
#include "reference_oracles.hpp"

using namespace homodyne;
using Complex = std::complex<double>;

TEST_CASE("CountOutcome validity") {
  CHECK(CountOutcome{4, 2}.valid());
  CHECK(CountOutcome{5, -3}.valid());
  CHECK_FALSE(CountOutcome{4, 1}.valid());   // parity
  CHECK_FALSE(CountOutcome{4, 6}.valid());   // range
  CHECK_FALSE(CountOutcome{-2, 0}.valid());
  CHECK(CountOutcome{7, 3}.count_port1() == 5);
  CHECK(CountOutcome{7, 3}.count_port2() == 2);
}

TEST_CASE("amplitude edge cases") {
  const auto psi = make_coherent(Complex(0.8, 0.3), 25);
  const LocalOscillator lo(2.0, 0.0);

  // outcome (0,0): only the n = 0 term survives, M = e^{-A^2/2} psi_0
  const Complex m00 = amplitude(psi, lo, CountOutcome{0, 0});
  const Complex expected = std::exp(-2.0) * psi.coeffs[0];
  CHECK(std::abs(m00 - expected) <= 1e-15);

  CHECK_THROWS_AS(amplitude(psi, LocalOscillator(2.0, 0.4), CountOutcome{0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(amplitude(psi, lo, CountOutcome{4, 1}),
                  std::invalid_argument);
}

TEST_CASE("vacuum signal gives the product-Poisson law") {
  const auto vacuum = make_number(0, 0);
  const LocalOscillator lo(2.0, 0.0);
  double sup = 0.0;
  for (int two_j = 0; two_j <= 20; ++two_j) {
    for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
      const CountOutcome outcome{two_j, two_m};
      const double engine = probability(vacuum, lo, outcome);
      const double reference =
          std::exp(log_poisson(outcome.count_port1(), 2.0) +
                   log_poisson(outcome.count_port2(), 2.0));
      sup = std::max(sup, std::abs(engine - reference));
    }
  }
  CHECK(sup <= 1e-12);
}

TEST_CASE("single photon splits against a hand-built multiplet") {
  // |1> with a weak LO: the two_j = 2 amplitudes come from the 3-dim block
  const auto psi = make_number(1, 1);
  const LocalOscillator lo(1.5, 0.0);
  const Eigen::MatrixXd block = wigner_d_oracle(2);

  // input on the two_j = 2 multiplet: LO supplies one photon, signal one;
  // n1 = 1, n2 = 1 sits at m' = 0
  const double lo_coeff = std::exp(-1.5 * 1.5 / 2.0) * (-1.5);
  for (int row = 0; row <= 2; ++row) {
    const int two_m = -2 + 2 * row;
    const double expected = lo_coeff * block(row, 1);
    const Complex engine = amplitude(psi, lo, CountOutcome{2, two_m});
    CHECK(std::abs(engine - expected) <= 1e-14);
  }
}

TEST_CASE("mixed-state probability is the weighted pure mean") {
  std::vector<std::pair<double, FockDensity<double>>> parts;
  parts.emplace_back(0.5, to_density(make_number(0, 1)));
  parts.emplace_back(0.5, to_density(make_number(1, 1)));
  const auto rho = mix(parts);
  const LocalOscillator lo(1.2, 0.0);
  for (int two_j : {0, 1, 2, 3, 4}) {
    for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
      const CountOutcome outcome{two_j, two_m};
      const double mixed = probability(rho, lo, outcome);
      const double mean =
          0.5 * probability(make_number(0, 1), lo, outcome) +
          0.5 * probability(make_number(1, 1), lo, outcome);
      CHECK(std::abs(mixed - mean) <= 1e-14);
    }
  }
}

TEST_CASE("non-positive density is rejected") {
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  bad(0, 1) = bad(1, 0) = 0.9;
  CHECK_THROWS_WITH_AS(
      probability(FockDensity<double>{bad}, LocalOscillator(1.0, 0.0),
                  CountOutcome{0, 0}),
      doctest::Contains("positive semidefinite"), std::invalid_argument);
}

TEST_CASE("coherent signal at strong LO matches the oracle spot-on") {
  const Complex beta(2.0, 0.0);
  const auto psi = make_coherent(beta);
  const LocalOscillator lo(20.0, 0.0);
  const CountOutcome outcome{400, 40};
  const double engine = probability(psi, lo, outcome);
  const double reference = coherent_oracle(beta, lo, outcome);
  CHECK(std::abs(engine - reference) <= 1e-9 * reference);
}

TEST_CASE("coherent_oracle closed forms") {
  const LocalOscillator lo(2.0, 0.0);
  // vacuum signal: symmetric product of Poissons with mean A^2/2
  CHECK(coherent_oracle(Complex(0, 0), lo, CountOutcome{4, 0}) ==
        doctest::Approx(std::exp(2.0 * log_poisson(2, 2.0))).epsilon(1e-12));
  // beta = -alpha pushes all light into port 1: only two_m = two_j survives
  const Complex beta(2.0, 0.0);  // alpha = -A = -2
  CHECK(coherent_oracle(beta, lo, CountOutcome{6, 6}) > 0.0);
  CHECK(coherent_oracle(beta, lo, CountOutcome{6, 4}) == 0.0);
}

TEST_CASE("phase covariance wiring") {
  const auto psi = make_coherent(Complex(1.1, 0.7), 30);
  const double phi = 0.61;
  const LocalOscillator with_phase(3.0, phi);
  const LocalOscillator no_phase(3.0, 0.0);
  const auto rotated = rotate_phase(psi, phi);
  for (int two_j : {6, 9, 12}) {
    for (int two_m = -two_j; two_m <= two_j; two_m += 4) {
      const CountOutcome outcome{two_j, two_m};
      CHECK(std::abs(probability(psi, with_phase, outcome) -
                     probability(rotated, no_phase, outcome)) <= 1e-12);
    }
  }
}

TEST_CASE("amplitude sum against a naive extended-precision evaluation") {
  const auto psi = make_coherent(Complex(1.4, -0.6), 30);
  const double a = 3.0;
  const CountOutcome outcome{14, 4};
  const auto column = wigner_d_pi2<long double>(outcome.two_j, outcome.two_m);
  std::complex<long double> reference(0, 0);
  for (int n = 0; n <= std::min(psi.cutoff(), outcome.two_j); ++n) {
    const int power = outcome.two_j - n;
    const long double w =
        std::exp(-0.5L * a * a + power * std::log((long double)a) -
                 0.5L * reference::log_fact(power));
    const int parity =
        (power + (outcome.two_j - 2 * n - outcome.two_m) / 2) & 1;
    const long double sign = parity ? -1.0L : 1.0L;
    reference += std::complex<long double>(psi.coeffs[n].real(),
                                           psi.coeffs[n].imag()) *
                 (sign * w * column.values[outcome.two_j - n]);
  }
  const Complex engine =
      amplitude(psi, LocalOscillator(a, 0.0), outcome);
  CHECK(std::abs(engine - Complex(double(reference.real()),
                                  double(reference.imag()))) <=
        1e-12 * std::abs(engine));
}

TEST_CASE("signal support above the photon sum contributes nothing") {
  // counting 2j photons in total is impossible when the signal alone
  // carries more than 2j; those coefficients drop out of the finite sum
  const auto three = make_number(3, 3);
  const LocalOscillator lo(1.5, 0.0);
  for (int two_j : {0, 1, 2}) {
    for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
      CHECK(amplitude(three, lo, CountOutcome{two_j, two_m}) ==
            Complex(0.0, 0.0));
    }
  }
  CHECK(std::abs(amplitude(three, lo, CountOutcome{3, 1})) > 0.0);
}

TEST_CASE("photon-sum slices carry the input total-photon distribution") {
  // the splitter conserves total photon number, so summing P^j_m over m at
  // fixed 2j must reproduce Poisson(LO) convolved with the signal's photon
  // statistics
  const auto psi = make_coherent(Complex(1.1, -0.5), 25);
  const double a = 3.0;
  const LocalOscillator lo(a, 0.0);
  for (int two_j : {0, 3, 9, 14}) {
    std::vector<CountOutcome> slice;
    for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
      slice.push_back(CountOutcome{two_j, two_m});
    }
    const auto dist = distribution_over(psi, lo, slice);
    long double expected = 0.0L;
    for (int n = 0; n <= std::min(psi.cutoff(), two_j); ++n) {
      expected += std::norm(psi.coeffs[n]) *
                  std::exp(static_cast<long double>(
                      log_poisson(two_j - n, a * a)));
    }
    CHECK(std::abs(dist.total_mass - double(expected)) <= 1e-13);
  }
}

TEST_CASE("distribution window accounting") {
  const auto vacuum = make_number(0, 0);
  const LocalOscillator lo(5.0, 0.0);
  const auto dist = distribution(vacuum, lo);
  CHECK(dist.total_mass >= 1.0 - 1e-8);
  CHECK(dist.total_mass <= 1.0 + 1e-9);
  CHECK(dist.window_tail_bound >= 0.0);
  CHECK(dist.window_tail_bound <= 1e-8);
  CHECK(dist.probs.minCoeff() >= 0.0);

  // a window of one outcome carries exactly that probability
  const CountOutcome single{25, 1};
  const auto slice = distribution_over(vacuum, lo, {single});
  CHECK(slice.total_mass ==
        doctest::Approx(probability(vacuum, lo, single)).epsilon(1e-13));

  // completeness grows monotonically with the window
  double previous = 0.0;
  for (double c : {1.0, 2.0, 4.0, 8.0}) {
    const auto d = distribution(vacuum, lo, WindowPolicy{c, {}});
    CHECK(d.total_mass >= previous - 1e-15);
    previous = d.total_mass;
  }

  // number-state example at A = 20
  const auto six = make_number(6);
  const auto d6 = distribution(six, LocalOscillator(20.0, 0.0));
  CHECK(d6.total_mass >= 1.0 - 1e-6);
}

TEST_CASE("distribution respects the |two_m| cap") {
  const auto psi = make_coherent(Complex(1.0, 0.0), 21);
  const LocalOscillator lo(4.0, 0.0);
  WindowPolicy policy;
  policy.two_m_cap = 6;
  const auto dist = distribution(psi, lo, policy);
  for (const CountOutcome& outcome : dist.window) {
    CHECK(std::abs(outcome.two_m) <= 6);
  }
  // the dropped-m estimate participates in the tail bound, and the bound
  // still covers the mass actually missing from the window
  const auto full = distribution(psi, lo);
  CHECK(dist.window_tail_bound >= full.window_tail_bound);
  CHECK(dist.total_mass < full.total_mass);
  CHECK(dist.total_mass + dist.window_tail_bound >= 1.0 - 1e-9);
}

TEST_CASE("slice distribution agrees with per-outcome probabilities") {
  std::vector<std::pair<double, FockDensity<double>>> parts;
  parts.emplace_back(0.3, to_density(make_coherent(Complex(0.5, 0.1), 18)));
  parts.emplace_back(0.7, to_density(make_number(1, 18)));
  const auto rho = mix(parts);
  const LocalOscillator lo(3.0, 0.2);
  std::vector<CountOutcome> window;
  for (int two_m = -8; two_m <= 8; two_m += 2) {
    window.push_back(CountOutcome{10, two_m});
  }
  const auto dist = distribution_over(rho, lo, window);
  for (size_t i = 0; i < window.size(); ++i) {
    CHECK(std::abs(dist.probs[static_cast<Eigen::Index>(i)] -
                   probability(rho, lo, window[i])) <= 1e-13);
  }
  CHECK(dist.prob(CountOutcome{10, 0}).has_value());
  CHECK_FALSE(dist.prob(CountOutcome{12, 0}).has_value());
}

TEST_CASE("truncating a coherent density barely moves the distribution") {
  // dropping the far coefficient tail at N = 30 shifts P^j_m by less than
  // 1e-8 anywhere on the probable grid
  const auto rho = to_density(make_coherent(Complex(2.0, 0.0)));
  const auto truncated = truncate_density(rho, 30);
  const LocalOscillator lo(20.0, 0.0);
  std::vector<CountOutcome> window;
  for (int two_j : {390, 400, 410}) {
    for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
      window.push_back(CountOutcome{two_j, two_m});
    }
  }
  const auto before = distribution_over(rho, lo, window);
  const auto after = distribution_over(truncated, lo, window);
  CHECK((before.probs - after.probs).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("empty outcome windows are rejected") {
  const auto psi = make_number(0, 0);
  CHECK_THROWS_AS(distribution_over(psi, LocalOscillator(2.0, 0.0), {}),
                  std::invalid_argument);
}

TEST_CASE("marginal difference distribution") {
  const auto vacuum = make_number(0, 0);
  const LocalOscillator lo(5.0, 0.0);
  const auto dist = distribution(vacuum, lo);
  const auto marginal = marginal_difference(dist);

  // symmetric signal: P_m = P_{-m}
  for (const auto& [two_m, p] : marginal) {
    if (two_m <= 0) continue;
    CHECK(std::abs(p - marginal.at(-two_m)) <= 1e-12);
  }

  // against the difference of two independent Poisson counts
  const double mean = 12.5;  // A^2/2
  for (int two_m = -12; two_m <= 12; two_m += 3) {
    long double reference = 0.0L;
    for (int k = std::max(0, -two_m); k <= 120; ++k) {
      reference += std::exp(
          static_cast<long double>(log_poisson(k + two_m, mean)) +
          static_cast<long double>(log_poisson(k, mean)));
    }
    CHECK(std::abs(marginal.at(two_m) - double(reference)) <= 1e-10);
  }
}

TEST_CASE("brute-force oracle cross-validations") {
  // two oracles agree on a coherent signal
  {
    const LocalOscillator lo(1.0, 0.0);
    const auto psi = make_coherent(Complex(0.0, 0.0));
    const auto brute = brute_force_bs_oracle(psi, lo, 30);
    for (size_t i = 0; i < brute.window.size(); ++i) {
      const double reference =
          coherent_oracle(Complex(0.0, 0.0), lo, brute.window[i]);
      CHECK(std::abs(brute.probs[static_cast<Eigen::Index>(i)] - reference) <=
            1e-10);
    }
  }
  // engine vs brute force on |1>
  {
    const LocalOscillator lo(1.5, 0.0);
    const auto psi = make_number(1, 1);
    const auto brute = brute_force_bs_oracle(psi, lo, 30);
    for (size_t i = 0; i < brute.window.size(); ++i) {
      if (brute.probs[static_cast<Eigen::Index>(i)] < 1e-14) continue;
      const double engine = probability(psi, lo, brute.window[i]);
      CHECK(std::abs(engine - brute.probs[static_cast<Eigen::Index>(i)]) <=
            1e-10);
    }
  }
  // degenerate splitter: a single photon exits either port with odds 1/2
  {
    const auto lo = LocalOscillator::unchecked(0.0, 0.0);
    const auto psi = make_number(1, 1);
    const auto brute = brute_force_bs_oracle(psi, lo, 10, true);
    CHECK(*brute.prob(CountOutcome{1, 1}) == doctest::Approx(0.5));
    CHECK(*brute.prob(CountOutcome{1, -1}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(brute_force_bs_oracle(psi, lo, 10), std::invalid_argument);
  }
  CHECK_THROWS_AS(
      brute_force_bs_oracle(make_number(1, 1), LocalOscillator(1.0, 0.0), 300),
      std::invalid_argument);
}

TEST_CASE("random signal states: engine vs brute force across phases") {
  std::mt19937 rng(20260810);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const int cutoff = 2 + static_cast<int>(rng() % 5);
    FockVector<double> psi;
    psi.coeffs.resize(cutoff + 1);
    for (int n = 0; n <= cutoff; ++n) {
      psi.coeffs[n] = Complex(uniform(rng), uniform(rng));
    }
    psi.normalize();
    const double a = 0.8 + 0.5 * std::abs(uniform(rng));
    const double phase = 3.0 * uniform(rng);
    const LocalOscillator lo(a, phase);
    const auto brute = brute_force_bs_oracle(psi, lo, 30);
    CHECK(brute.total_mass >= 1.0 - 1e-11);
    double sup = 0.0;
    for (size_t i = 0; i < brute.window.size(); ++i) {
      sup = std::max(sup,
                     std::abs(probability(psi, lo, brute.window[i]) -
                              brute.probs[static_cast<Eigen::Index>(i)]));
    }
    CHECK(sup <= 1e-11);
  }
}

TEST_CASE("scalar-templated lanes agree across precisions") {
  const auto psi_d = make_coherent(std::complex<double>(0.7, 0.2), 20);
  const auto psi_l =
      make_coherent(std::complex<long double>(0.7L, 0.2L), 20);
  const LocalOscillator lo(2.5, 0.0);
  for (int two_j : {3, 6, 9, 12}) {
    for (int two_m = -two_j; two_m <= two_j; two_m += 3) {
      if (((two_m - two_j) % 2) != 0) continue;
      const CountOutcome outcome{two_j, two_m};
      const double p_double = probability(psi_d, lo, outcome);
      const long double p_long = probability(psi_l, lo, outcome);
      CHECK(std::abs(p_double - double(p_long)) <=
            1e-13 * std::max(1e-30, double(p_long)));
    }
  }
}

TEST_CASE("brute force validates LO phase handling independently") {
  FockVector<double> psi;
  psi.coeffs.resize(3);
  psi.coeffs << Complex(0.6, 0.0), Complex(0.5, -0.3), Complex(0.4, 0.2);
  psi.normalize();
  const LocalOscillator lo(1.2, 0.7);
  const auto brute = brute_force_bs_oracle(psi, lo, 30);
  double sup = 0.0;
  for (size_t i = 0; i < brute.window.size(); ++i) {
    sup = std::max(sup,
                   std::abs(probability(psi, lo, brute.window[i]) -
                            brute.probs[static_cast<Eigen::Index>(i)]));
  }
  CHECK(sup <= 1e-12);
}
