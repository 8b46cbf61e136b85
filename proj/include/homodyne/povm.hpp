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

#ifndef HOMODYNE_POVM_HPP_
#define HOMODYNE_POVM_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "homodyne/exact.hpp"
#include "homodyne/log_weight.hpp"
#include "homodyne/states.hpp"

namespace homodyne {

/// Truncation level of the correction series: keep every generated term whose
/// total count of field operators (annihilation plus creation) stays at or
/// below this even bound.
struct SeriesOrder {
  int max_field_operators = 0;
};

inline constexpr int kSeriesOrderCap = 8;

/// One term of the expanded correction series.  After normal ordering is
/// imposed, a product of exponent monomials reduces to a scalar coefficient
/// times <x| a^r rho (a^dag)^s |x>; the multiset of monomials is kept so the
/// coefficient can be evaluated for any (two_j, two_m, A).
struct SeriesTerm {
  struct Factor {
    int power = 0;        // field operators contributed by one monomial use
    bool creation = false;
    int multiplicity = 0;
  };

  int r = 0;  // annihilation power, applied on the ket side
  int s = 0;  // creation power, applied on the bra side
  std::vector<Factor> factors;

  /// Scalar coefficient of the (r, s) matrix element.  Monomial values:
  /// power 2 carries -(2j - A^2)/(2A^2); odd powers p carry 2m/(p A^p);
  /// even powers p >= 4 carry -j/((p/2) A^p).  A multiset contributes the
  /// product of its monomial values divided by the multiplicity factorials.
  double coefficient(int two_j, int two_m, double A) const {
    double value = 1.0;
    for (const Factor& f : factors) {
      double c;
      if (f.power == 2) {
        c = -(static_cast<double>(two_j) - A * A) / (2.0 * A * A);
      } else if (f.power % 2 == 1) {
        c = static_cast<double>(two_m) / (f.power * std::pow(A, f.power));
      } else {
        c = -static_cast<double>(two_j) / (f.power * std::pow(A, f.power));
      }
      for (int i = 0; i < f.multiplicity; ++i) value *= c;
      for (int i = 2; i <= f.multiplicity; ++i) value /= i;
    }
    return value;
  }
};

/// Expands the exponential of the correction exponent through the requested
/// field-operator count.  The exponent supplies one annihilation-side and one
/// creation-side monomial per power 2..max; the Taylor expansion enumerates
/// every multiset of those monomials whose total power fits the order.
inline std::vector<SeriesTerm> series_terms(SeriesOrder order) {
  const int cap = order.max_field_operators;
  if (cap < 0 || cap % 2 != 0) {
    throw std::invalid_argument(
        "series_terms: order must be even and non-negative, got " +
        std::to_string(cap));
  }
  if (cap > kSeriesOrderCap) {
    throw std::invalid_argument("series_terms: order " + std::to_string(cap) +
                                " exceeds the engineering cap " +
                                std::to_string(kSeriesOrderCap));
  }

  struct Monomial {
    int power;
    bool creation;
  };
  std::vector<Monomial> alphabet;
  for (int p = 2; p <= cap; ++p) {
    alphabet.push_back({p, false});
    alphabet.push_back({p, true});
  }

  std::vector<SeriesTerm> terms;
  SeriesTerm current;
  const std::function<void(size_t, int)> recurse = [&](size_t idx,
                                                       int budget) {
    if (idx == alphabet.size()) {
      terms.push_back(current);
      return;
    }
    const Monomial mono = alphabet[idx];
    recurse(idx + 1, budget);  // multiplicity 0
    int added = 0;
    for (int mult = 1; mult * mono.power <= budget; ++mult) {
      if (mult == 1) {
        current.factors.push_back({mono.power, mono.creation, 1});
      } else {
        current.factors.back().multiplicity = mult;
      }
      (mono.creation ? current.s : current.r) += mono.power;
      added += mono.power;
      recurse(idx + 1, budget - mult * mono.power);
    }
    if (added > 0) {
      (mono.creation ? current.s : current.r) -= added;
      current.factors.pop_back();
    }
  };
  recurse(0, cap);

  std::sort(terms.begin(), terms.end(),
            [](const SeriesTerm& a, const SeriesTerm& b) {
              const int ta = a.r + a.s, tb = b.r + b.s;
              if (ta != tb) return ta < tb;
              if (a.r != b.r) return a.r < b.r;
              return a.s < b.s;
            });
  return terms;
}

/// Exact log-domain evaluation of the series prefactor
///   sqrt(pi) 2^{-2j} e^{-A^2} A^{4j} e^{2m^2/A^2} / ((j+m)! (j-m)!).
/// With `gaussian_limit` set, returns instead the strong-LO Gaussian form
/// e^{-(2j-A^2)^2 / 2A^2} / (sqrt(pi) A^2) for comparison.
inline LogWeight series_prefactor(int two_j, int two_m, double A,
                                  bool gaussian_limit = false) {
  validate_outcome(CountOutcome{two_j, two_m});
  if (!(A > 0)) {
    throw std::invalid_argument("series_prefactor: A must be positive");
  }
  const long double a = A;
  const long double pi = detail::pi_v<long double>;
  if (gaussian_limit) {
    const long double dev = static_cast<long double>(two_j) - a * a;
    return LogWeight::from_log(
        static_cast<double>(-dev * dev / (2.0L * a * a) -
                            0.5L * std::log(pi) - 2.0L * std::log(a)),
        1);
  }
  const long long j_plus_m = (two_j + two_m) / 2;
  const long long j_minus_m = (two_j - two_m) / 2;
  const long double m = static_cast<long double>(two_m) / 2.0L;
  const long double log_value =
      0.5L * std::log(pi) - static_cast<long double>(two_j) * std::log(2.0L) -
      a * a + 2.0L * static_cast<long double>(two_j) * std::log(a) +
      2.0L * m * m / (a * a) -
      static_cast<long double>(log_factorial<long double>(j_plus_m)) -
      static_cast<long double>(log_factorial<long double>(j_minus_m));
  return LogWeight::from_log(static_cast<double>(log_value), 1);
}

/// Which continuous variable the discrete outcome is mapped to.
enum class XConvention {
  m_over_sqrt_j,    // x = m / sqrt(j)
  sqrt2_m_over_A,   // x = sqrt(2) m / A
};

namespace detail {

/// Ladder-dressed oscillator eigenfunction values
///   g_r[k] = sqrt(k!/(k-r)!) u_{k-r}(x),  k = 0..n_max  (zero for k < r),
/// so that <x| a^r |k> = g_r[k].
template <typename Real>
Eigen::Vector<Real, Eigen::Dynamic> ladder_projection(
    const Eigen::Vector<Real, Eigen::Dynamic>& u_table, int r, int n_max) {
  Eigen::Vector<Real, Eigen::Dynamic> g(n_max + 1);
  g.setZero();
  using Wide = widen_t<Real>;
  for (int k = r; k <= n_max; ++k) {
    const Wide log_fall =
        Wide(0.5) * (log_factorial<Wide>(k) - log_factorial<Wide>(k - r));
    g[k] = static_cast<Real>(std::exp(log_fall)) * u_table[k - r];
  }
  return g;
}

template <typename Real>
void check_matrix_element_args(int r, int s, int cutoff) {
  if (r < 0 || s < 0) {
    throw std::invalid_argument(
        "quadrature_matrix_element: r and s must be non-negative");
  }
  if (r + s + cutoff > kHermiteGaussianCap) {
    throw std::invalid_argument(
        "quadrature_matrix_element: r + s + cutoff exceeds the "
        "oscillator-function cap");
  }
}

}  // namespace detail

/// <x| a^r rho (a^dag)^s |x>, composed from ladder matrix elements and
/// oscillator eigenfunction values.
template <typename Real>
std::complex<Real> quadrature_matrix_element(const FockDensity<Real>& rho,
                                             int r, int s, Real x) {
  detail::check_matrix_element_args<Real>(r, s, rho.cutoff());
  const int n_max = rho.cutoff();
  const auto u_table = hermite_gaussian_table<Real>(n_max, x);
  const auto g_r = detail::ladder_projection(u_table, r, n_max);
  const auto g_s = detail::ladder_projection(u_table, s, n_max);
  using Complex = std::complex<Real>;
  return (g_r.template cast<Complex>().transpose() * rho.matrix *
          g_s.template cast<Complex>())(0);
}

namespace detail {

template <typename Real>
Real x_for_outcome(CountOutcome outcome, double A, XConvention convention) {
  if (convention == XConvention::m_over_sqrt_j) {
    if (outcome.two_j == 0) {
      throw std::invalid_argument(
          "asymptotic_probability: x = m/sqrt(j) is undefined at two_j = 0");
    }
    const Real m = Real(outcome.two_m) / Real(2);
    const Real j = Real(outcome.two_j) / Real(2);
    return m / std::sqrt(j);
  }
  return Real(outcome.two_m) / (std::sqrt(Real(2)) * Real(A));
}

/// <x|rho|x> through the eigenvector expansion (pure states go direct).
template <typename Real>
Real quadrature_density_value(const FockVector<Real>& psi, Real x) {
  const auto u_table = hermite_gaussian_table<Real>(psi.cutoff(), x);
  std::complex<Real> proj(0, 0);
  for (int n = 0; n <= psi.cutoff(); ++n) {
    proj += psi.coeffs[n] * u_table[n];
  }
  return std::norm(proj);
}

template <typename Real>
Real quadrature_density_value(const FockDensity<Real>& rho, Real x) {
  Real total = 0;
  for (const auto& [w, psi] : pure_components(rho)) {
    total += w * quadrature_density_value(psi, x);
  }
  return total;
}

template <typename Real, typename State>
Real asymptotic_probability_impl(const State& state, const LocalOscillator& lo,
                                 CountOutcome outcome,
                                 XConvention convention) {
  validate_outcome(outcome);
  const Real x = x_for_outcome<Real>(outcome, lo.amplitude, convention);
  const State* rotated_ptr = &state;
  State rotated;
  if (lo.phase != 0.0) {
    rotated = rotate_phase(state, static_cast<Real>(lo.phase));
    rotated_ptr = &rotated;
  }
  const Real density_value = quadrature_density_value(*rotated_ptr, x);
  const LogWeight pref =
      series_prefactor(outcome.two_j, outcome.two_m, lo.amplitude, true);
  if (density_value <= Real(0)) return Real(0);
  return static_cast<Real>(
      std::exp(static_cast<widen_t<Real>>(pref.log_magnitude) +
               std::log(static_cast<widen_t<Real>>(density_value))));
}

/// Coefficient-weighted matrix elements grouped by (r, s).  `matel` maps an
/// (r, s) pair to <x| a^r rho (a^dag)^s |x>.
template <typename Real, typename MatEl>
std::map<std::pair<int, int>, std::pair<double, std::complex<Real>>>
series_grouped_evaluation(const std::vector<SeriesTerm>& terms, int two_j,
                          int two_m, double A, MatEl&& matel) {
  std::map<std::pair<int, int>, double> coefficients;
  for (const SeriesTerm& term : terms) {
    coefficients[{term.r, term.s}] += term.coefficient(two_j, two_m, A);
  }
  std::map<std::pair<int, int>, std::pair<double, std::complex<Real>>> out;
  for (const auto& [rs, coeff] : coefficients) {
    out[rs] = {coeff, matel(rs.first, rs.second)};
  }
  return out;
}

template <typename Real, typename State, typename Use>
void series_with_matrix_elements(const State& state, const LocalOscillator& lo,
                                 CountOutcome outcome, SeriesOrder order,
                                 Use&& use) {
  validate_outcome(outcome);
  const auto terms = series_terms(order);
  const Real x =
      x_for_outcome<Real>(outcome, lo.amplitude, XConvention::sqrt2_m_over_A);

  const State* working = &state;
  State rotated;
  if (lo.phase != 0.0) {
    rotated = rotate_phase(state, static_cast<Real>(lo.phase));
    working = &rotated;
  }

  const int n_max = working->cutoff();
  const auto u_table = hermite_gaussian_table<Real>(n_max, x);

  if constexpr (std::is_same_v<State, FockVector<Real>>) {
    // <x| a^r |psi><psi| (a^dag)^s |x> factorizes into f_r conj(f_s).
    std::map<int, std::complex<Real>> f;
    const auto projection = [&](int r) {
      auto it = f.find(r);
      if (it != f.end()) return it->second;
      const auto g = ladder_projection(u_table, r, n_max);
      std::complex<Real> value(0, 0);
      for (int k = 0; k <= n_max; ++k) value += working->coeffs[k] * g[k];
      f.emplace(r, value);
      return value;
    };
    use(series_grouped_evaluation<Real>(
        terms, outcome.two_j, outcome.two_m, lo.amplitude, [&](int r, int s) {
          return projection(r) * std::conj(projection(s));
        }));
  } else {
    detail::check_matrix_element_args<Real>(kSeriesOrderCap, 0, n_max);
    using Complex = std::complex<Real>;
    using CVector = Eigen::Vector<Complex, Eigen::Dynamic>;
    std::map<int, Eigen::Vector<Real, Eigen::Dynamic>> g_cache;
    std::map<int, CVector> rho_g_cache;
    const auto g_of = [&](int r) -> const Eigen::Vector<Real, Eigen::Dynamic>& {
      auto it = g_cache.find(r);
      if (it == g_cache.end()) {
        it = g_cache.emplace(r, ladder_projection(u_table, r, n_max)).first;
      }
      return it->second;
    };
    const auto rho_g_of = [&](int s) -> const CVector& {
      auto it = rho_g_cache.find(s);
      if (it == rho_g_cache.end()) {
        it = rho_g_cache
                 .emplace(s, working->matrix *
                                 g_of(s).template cast<Complex>())
                 .first;
      }
      return it->second;
    };
    use(series_grouped_evaluation<Real>(
        terms, outcome.two_j, outcome.two_m, lo.amplitude, [&](int r, int s) {
          return (g_of(r).template cast<Complex>().transpose() *
                  rho_g_of(s))(0);
        }));
  }
}

template <typename Real, typename State>
Real series_probability_impl(const State& state, const LocalOscillator& lo,
                             CountOutcome outcome, SeriesOrder order) {
  using Wide = widen_t<Real>;
  Wide bracket = 0;
  series_with_matrix_elements<Real>(
      state, lo, outcome, order, [&](const auto& grouped) {
        for (const auto& [rs, entry] : grouped) {
          bracket += static_cast<Wide>(entry.first) *
                     static_cast<Wide>(entry.second.real());
        }
      });

  if (bracket == Wide(0)) return Real(0);
  const LogWeight pref =
      series_prefactor(outcome.two_j, outcome.two_m, lo.amplitude);
  const Real sign = bracket > Wide(0) ? Real(1) : Real(-1);
  return sign * static_cast<Real>(
                    std::exp(static_cast<Wide>(pref.log_magnitude) +
                             std::log(std::abs(bracket))));
}

}  // namespace detail

/// Strong-LO limit of the counting probability: Gaussian photon-sum factor
/// times <x|rho|x>, with the outcome-to-x map chosen by `convention`.
template <typename Real>
Real asymptotic_probability(const FockVector<Real>& psi,
                            const LocalOscillator& lo, CountOutcome outcome,
                            XConvention convention) {
  return detail::asymptotic_probability_impl<Real>(psi, lo, outcome,
                                                   convention);
}

template <typename Real>
Real asymptotic_probability(const FockDensity<Real>& rho,
                            const LocalOscillator& lo, CountOutcome outcome,
                            XConvention convention) {
  return detail::asymptotic_probability_impl<Real>(rho, lo, outcome,
                                                   convention);
}

/// Finite-LO counting probability through the order-truncated correction
/// series: exact prefactor times the sum of normally ordered matrix elements
/// at x = sqrt(2) m / A.  Requested finite order only; no convergence claim.
template <typename Real>
Real series_probability(const FockVector<Real>& psi, const LocalOscillator& lo,
                        CountOutcome outcome, SeriesOrder order) {
  return detail::series_probability_impl<Real>(psi, lo, outcome, order);
}

template <typename Real>
Real series_probability(const FockDensity<Real>& rho,
                        const LocalOscillator& lo, CountOutcome outcome,
                        SeriesOrder order) {
  return detail::series_probability_impl<Real>(rho, lo, outcome, order);
}

/// One grouped (r, s) contribution of the truncated series, in probability
/// units: summing `contribution` over a breakdown reproduces
/// series_probability at the same order.
struct SeriesContribution {
  int r = 0;
  int s = 0;
  double coefficient = 0.0;                 // scalar in (two_j, two_m, A)
  std::complex<double> matrix_element{0, 0};
  double contribution = 0.0;                // prefactor * coeff * Re(matel)
};

/// Per-term view of the truncated series, for watching how the term
/// magnitudes behave (initial decrease, eventual growth) without ever
/// summing "to convergence".
template <typename Real>
std::vector<SeriesContribution> series_breakdown(const FockVector<Real>& psi,
                                                 const LocalOscillator& lo,
                                                 CountOutcome outcome,
                                                 SeriesOrder order) {
  std::vector<SeriesContribution> out;
  const double pref =
      series_prefactor(outcome.two_j, outcome.two_m, lo.amplitude).value();
  detail::series_with_matrix_elements<Real>(
      psi, lo, outcome, order, [&](const auto& grouped) {
        for (const auto& [rs, entry] : grouped) {
          SeriesContribution c;
          c.r = rs.first;
          c.s = rs.second;
          c.coefficient = entry.first;
          c.matrix_element = {double(entry.second.real()),
                              double(entry.second.imag())};
          c.contribution = pref * c.coefficient * double(entry.second.real());
          out.push_back(c);
        }
      });
  return out;
}

/// Diagnostics for "is this LO strong enough": photon numbers, the typical
/// size of the quadratic exponent coefficient one LO standard deviation from
/// the photon-sum peak, and the measured size of the first correction.
struct StrongLoReport {
  double mean_photon = 0.0;
  double nbar_sq_over_a_sq = 0.0;
  /// |(2j - A^2)/(2A^2)| at 2j = A^2 + A, i.e. 1/(2A).
  double one_sigma_coefficient = 0.0;
  /// sup_m |P^(2) - P^(0)| / sup_m |P^(0)| at the evaluated photon sum.
  double order2_over_order0 = 0.0;
  int two_j_evaluated = 0;
};

namespace detail {

template <typename Real, typename State>
StrongLoReport strong_lo_report_impl(const State& state,
                                     const LocalOscillator& lo) {
  StrongLoReport report;
  const double A = lo.amplitude;
  report.mean_photon = static_cast<double>(mean_photon_number(state));
  report.nbar_sq_over_a_sq =
      report.mean_photon * report.mean_photon / (A * A);
  report.one_sigma_coefficient = 1.0 / (2.0 * A);
  report.two_j_evaluated = static_cast<int>(std::llround(A * A + A));

  const int two_j = report.two_j_evaluated;
  int cap = std::min(two_j,
                     static_cast<int>(std::floor(8.0 * std::sqrt(2.0) * A)));
  if (((cap - two_j) % 2) != 0) --cap;

  Real sup0 = 0, sup_diff = 0;
  for (int two_m = -cap; two_m <= cap; two_m += 2) {
    const CountOutcome outcome{two_j, two_m};
    const Real p0 = series_probability(state, lo, outcome, SeriesOrder{0});
    const Real p2 = series_probability(state, lo, outcome, SeriesOrder{2});
    sup0 = std::max(sup0, std::abs(p0));
    sup_diff = std::max(sup_diff, std::abs(p2 - p0));
  }
  report.order2_over_order0 =
      sup0 > Real(0) ? static_cast<double>(sup_diff / sup0) : 0.0;
  return report;
}

}  // namespace detail

template <typename Real>
StrongLoReport strong_lo_report(const FockVector<Real>& psi,
                                const LocalOscillator& lo) {
  return detail::strong_lo_report_impl<Real>(psi, lo);
}

template <typename Real>
StrongLoReport strong_lo_report(const FockDensity<Real>& rho,
                                const LocalOscillator& lo) {
  return detail::strong_lo_report_impl<Real>(rho, lo);
}

}  // namespace homodyne

#endif  // HOMODYNE_POVM_HPP_
