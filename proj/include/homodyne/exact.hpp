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

#ifndef HOMODYNE_EXACT_HPP_
#define HOMODYNE_EXACT_HPP_

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "homodyne/states.hpp"
#include "homodyne/wigner.hpp"

namespace homodyne {

/// Photon-counting outcome: the two detectors fire j+m and j-m times.  Both
/// labels cross every interface doubled (two_j = photon sum, two_m = photon
/// difference), so no half-integers ever appear.
struct CountOutcome {
  int two_j = 0;
  int two_m = 0;

  bool valid() const {
    return two_j >= 0 && std::abs(two_m) <= two_j &&
           ((two_j - two_m) % 2) == 0;
  }

  int count_port1() const { return (two_j + two_m) / 2; }
  int count_port2() const { return (two_j - two_m) / 2; }
};

inline void validate_outcome(CountOutcome outcome) {
  if (!outcome.valid()) {
    throw std::invalid_argument(
        "CountOutcome: (two_j, two_m) = (" + std::to_string(outcome.two_j) +
        ", " + std::to_string(outcome.two_m) +
        ") violates |two_m| <= two_j or parity");
  }
}

/// Which photon-sum slice of outcomes to evaluate: two_j ranges over
/// [A^2 - c*A, A^2 + c*A] (c defaults to ten LO standard deviations) and,
/// optionally, |two_m| is capped.
struct WindowPolicy {
  double c_sigmas = 10.0;
  std::optional<int> two_m_cap;
};

/// Counting distribution evaluated over a finite outcome window, together
/// with accounting for the probability mass the window can miss.
template <typename Real = double>
struct HomodyneDistribution {
  std::vector<CountOutcome> window;
  Eigen::Vector<Real, Eigen::Dynamic> probs;
  /// Natural logs of the probabilities (-inf where the probability is an
  /// exact zero); survives even where probs underflows to 0.
  Eigen::Vector<Real, Eigen::Dynamic> log_probs;
  LocalOscillator lo = LocalOscillator(1.0, 0.0);
  Real total_mass = 0;
  /// Upper bound on the mass lying outside the evaluated window.
  Real window_tail_bound = 0;

  /// Probability of one outcome, or nothing if it lies outside the window.
  std::optional<Real> prob(CountOutcome outcome) const {
    auto it = std::lower_bound(
        window.begin(), window.end(), outcome,
        [](CountOutcome a, CountOutcome b) {
          return a.two_j != b.two_j ? a.two_j < b.two_j : a.two_m < b.two_m;
        });
    if (it == window.end() || it->two_j != outcome.two_j ||
        it->two_m != outcome.two_m) {
      return std::nullopt;
    }
    return probs[static_cast<Eigen::Index>(it - window.begin())];
  }
};

namespace detail {

template <typename T>
struct KahanSum {
  T sum{};
  T carry{};
  void add(T term) {
    const T y = term - carry;
    const T t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

/// Amplitude held as mantissa * exp(log_scale); keeps the log-domain value
/// alive when the linear probability underflows.
template <typename Real>
struct ScaledComplex {
  Real log_scale = -std::numeric_limits<Real>::infinity();
  std::complex<Real> mantissa{0, 0};

  Real abs2_log() const {
    const Real m2 = std::norm(mantissa);
    if (m2 == Real(0)) return -std::numeric_limits<Real>::infinity();
    return Real(2) * log_scale + std::log(m2);
  }
  Real abs2() const {
    const Real l = abs2_log();
    return std::isinf(l) && l < Real(0) ? Real(0) : std::exp(l);
  }
};

/// Counting amplitude <jm| B |-A>|psi> for LO phase zero:
///   e^{-A^2/2} sum_n psi_n (-A)^{2j-n} / sqrt((2j-n)!) d^j_{m,j-n}(pi/2).
/// `column` must be the d column with lower index two_m; the needed
/// d^j_{m,j-n} entries are reached through the transpose symmetry
/// d_{m,m'} = (-1)^{m'-m} d_{m',m}.  Terms span hundreds of orders of
/// magnitude, so they are accumulated largest-first with compensation.
template <typename Real>
ScaledComplex<Real> amplitude_from_column(const FockVector<Real>& psi,
                                          Real lo_amplitude,
                                          CountOutcome outcome,
                                          const WignerDColumn<Real>& column) {
  using Wide = widen_t<Real>;
  const int two_j = outcome.two_j;
  const int n_top = std::min(psi.cutoff(), two_j);
  const Wide a = static_cast<Wide>(lo_amplitude);
  const Wide log_a =
      a > Wide(0) ? std::log(a) : -std::numeric_limits<Wide>::infinity();
  const Wide half_a2 = Wide(0.5) * a * a;

  struct Term {
    Wide log_mag;
    std::complex<Real> phase;  // unit modulus times sign bookkeeping
  };
  std::vector<Term> terms;
  terms.reserve(n_top + 1);

  for (int n = 0; n <= n_top; ++n) {
    const std::complex<Real> c = psi.coeffs[n];
    const Real c_mag = std::abs(c);
    if (c_mag == Real(0)) continue;
    const Real d = column.values[two_j - n];  // d^j_{j-n, m}
    if (d == Real(0)) continue;
    const int power = two_j - n;
    if (a == Wide(0) && power != 0) continue;
    const Wide log_w =
        -half_a2 + (power == 0 ? Wide(0) : Wide(power) * log_a) -
        Wide(0.5) * log_factorial<Wide>(power);
    // (-1)^{2j-n} from (-A)^{2j-n} and (-1)^{(j-n)-m} from the transpose.
    const int parity = (power + (two_j - 2 * n - outcome.two_m) / 2) & 1;
    const Real sign = parity ? Real(-1) : Real(1);
    const Real d_sign = d > Real(0) ? Real(1) : Real(-1);
    terms.push_back(Term{
        log_w + std::log(static_cast<Wide>(c_mag)) +
            std::log(static_cast<Wide>(std::abs(d))),
        (c / c_mag) * (sign * d_sign)});
  }

  ScaledComplex<Real> result;
  if (terms.empty()) return result;

  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return x.log_mag > y.log_mag; });
  const Wide log_max = terms.front().log_mag;

  KahanSum<Wide> re, im;
  for (const Term& t : terms) {
    const Wide mag = std::exp(t.log_mag - log_max);
    re.add(mag * static_cast<Wide>(t.phase.real()));
    im.add(mag * static_cast<Wide>(t.phase.imag()));
  }
  result.log_scale = static_cast<Real>(log_max);
  result.mantissa = std::complex<Real>(static_cast<Real>(re.sum),
                                       static_cast<Real>(im.sum));
  return result;
}

template <typename Real>
ScaledComplex<Real> amplitude_scaled(const FockVector<Real>& psi,
                                     Real lo_amplitude, CountOutcome outcome) {
  const auto column = wigner_d_pi2<Real>(outcome.two_j, outcome.two_m);
  return amplitude_from_column(psi, lo_amplitude, outcome, column);
}

/// Batched variant used by full-window evaluation: the caller owns one
/// d column per signal index n (lower index two_j - 2n), which is shared by
/// every two_m of the photon-sum slice.  d^j_{m,j-n} is read directly at
/// row m, so no transpose sign appears.
template <typename Real>
struct SliceColumns {
  int two_j = 0;
  std::vector<WignerDColumn<Real>> per_n;          // n = 0..n_top
  std::vector<detail::widen_t<Real>> log_weight;   // LO weight log magnitudes

  static SliceColumns build(int two_j, int n_top, Real lo_amplitude) {
    using Wide = detail::widen_t<Real>;
    SliceColumns cols;
    cols.two_j = two_j;
    cols.per_n.reserve(n_top + 1);
    cols.log_weight.reserve(n_top + 1);
    const Wide a = static_cast<Wide>(lo_amplitude);
    const Wide log_a =
        a > Wide(0) ? std::log(a) : -std::numeric_limits<Wide>::infinity();
    const Wide half_a2 = Wide(0.5) * a * a;
    for (int n = 0; n <= n_top; ++n) {
      cols.per_n.push_back(wigner_d_pi2<Real>(two_j, two_j - 2 * n));
      const int power = two_j - n;
      cols.log_weight.push_back(
          -half_a2 + (power == 0 ? Wide(0) : Wide(power) * log_a) -
          Wide(0.5) * log_factorial<Wide>(power));
    }
    return cols;
  }
};

template <typename Real>
ScaledComplex<Real> amplitude_from_slice(const FockVector<Real>& psi,
                                         Real lo_amplitude,
                                         const SliceColumns<Real>& slice,
                                         int two_m) {
  using Wide = widen_t<Real>;
  const int two_j = slice.two_j;
  const int n_top = std::min<int>(psi.cutoff(),
                                  static_cast<int>(slice.per_n.size()) - 1);
  const int row = (two_m + two_j) / 2;

  struct Term {
    Wide log_mag;
    std::complex<Real> phase;
  };
  std::vector<Term> terms;
  terms.reserve(n_top + 1);
  for (int n = 0; n <= n_top; ++n) {
    const std::complex<Real> c = psi.coeffs[n];
    const Real c_mag = std::abs(c);
    if (c_mag == Real(0)) continue;
    const Real d = slice.per_n[n].values[row];  // d^j_{m, j-n}
    if (d == Real(0)) continue;
    if (lo_amplitude == Real(0) && n != two_j) continue;
    const int parity = (two_j - n) & 1;  // (-1)^{2j-n}
    const Real sign = parity ? Real(-1) : Real(1);
    const Real d_sign = d > Real(0) ? Real(1) : Real(-1);
    terms.push_back(Term{slice.log_weight[n] +
                             std::log(static_cast<Wide>(c_mag)) +
                             std::log(static_cast<Wide>(std::abs(d))),
                         (c / c_mag) * (sign * d_sign)});
  }

  ScaledComplex<Real> result;
  if (terms.empty()) return result;
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return x.log_mag > y.log_mag; });
  const Wide log_max = terms.front().log_mag;
  KahanSum<Wide> re, im;
  for (const Term& t : terms) {
    const Wide mag = std::exp(t.log_mag - log_max);
    re.add(mag * static_cast<Wide>(t.phase.real()));
    im.add(mag * static_cast<Wide>(t.phase.imag()));
  }
  result.log_scale = static_cast<Real>(log_max);
  result.mantissa = std::complex<Real>(static_cast<Real>(re.sum),
                                       static_cast<Real>(im.sum));
  return result;
}

/// Eigendecomposition of a density matrix into weighted pure states.
/// Weights below the positivity tolerance are clipped to zero; weights below
/// -1e-10 reject the input.
template <typename Real>
std::vector<std::pair<Real, FockVector<Real>>> pure_components(
    const FockDensity<Real>& rho) {
  using Matrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic,
                               Eigen::Dynamic>;
  const Real herm_dev =
      (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > Real(1e-10)) {
    throw std::invalid_argument(
        "FockDensity: matrix is not Hermitian (max deviation " +
        std::to_string(double(herm_dev)) + ")");
  }
  const Real trace_dev = std::abs(rho.trace() - Real(1));
  if (trace_dev > Real(1e-8)) {
    throw std::invalid_argument("FockDensity: trace deviates from 1 by " +
                                std::to_string(double(trace_dev)));
  }
  const Matrix herm = (rho.matrix + rho.matrix.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("FockDensity: eigendecomposition failed");
  }
  std::vector<std::pair<Real, FockVector<Real>>> parts;
  for (int k = 0; k < solver.eigenvalues().size(); ++k) {
    const Real w = solver.eigenvalues()[k];
    if (w < Real(-1e-10)) {
      throw std::invalid_argument(
          "FockDensity: not positive semidefinite, eigenvalue " +
          std::to_string(double(w)));
    }
    if (w <= Real(0)) continue;
    FockVector<Real> psi;
    psi.coeffs = solver.eigenvectors().col(k);
    parts.emplace_back(w, std::move(psi));
  }
  return parts;
}

/// Runs fn(i) for i in [0, count); deterministic because every index owns its
/// own output slot.
template <typename Fn>
void parallel_for(Eigen::Index count, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (hw == 1 || count < 32) {
    for (Eigen::Index i = 0; i < count; ++i) fn(i);
    return;
  }
  const Eigen::Index chunk = (count + hw - 1) / hw;
  std::vector<std::future<void>> tasks;
  for (unsigned t = 0; t < hw; ++t) {
    const Eigen::Index begin = t * chunk;
    const Eigen::Index end = std::min(count, begin + chunk);
    if (begin >= end) break;
    tasks.push_back(std::async(std::launch::async, [begin, end, &fn] {
      for (Eigen::Index i = begin; i < end; ++i) fn(i);
    }));
  }
  for (auto& task : tasks) task.get();
}

template <typename Real>
Real log_sum_exp(const std::vector<Real>& logs) {
  Real m = -std::numeric_limits<Real>::infinity();
  for (Real l : logs) m = std::max(m, l);
  if (std::isinf(m) && m < Real(0)) return m;
  widen_t<Real> s = 0;
  for (Real l : logs) s += std::exp(static_cast<widen_t<Real>>(l - m));
  return m + static_cast<Real>(std::log(s));
}

}  // namespace detail

/// Counting amplitude M^j_m for a pure signal and LO phase zero.  Nonzero LO
/// phases are handled one level up by pre-rotating the signal state.
template <typename Real>
std::complex<Real> amplitude(const FockVector<Real>& psi,
                             const LocalOscillator& lo, CountOutcome outcome) {
  validate_outcome(outcome);
  if (lo.phase != 0.0) {
    throw std::invalid_argument(
        "amplitude: LO phase must be 0; rotate the signal state instead");
  }
  const auto scaled =
      detail::amplitude_scaled(psi, static_cast<Real>(lo.amplitude), outcome);
  if (scaled.mantissa == std::complex<Real>(0, 0)) return {0, 0};
  return scaled.mantissa * std::exp(scaled.log_scale);
}

/// P^j_m for a pure signal state.
template <typename Real>
Real probability(const FockVector<Real>& psi, const LocalOscillator& lo,
                 CountOutcome outcome) {
  validate_outcome(outcome);
  const FockVector<Real>* state = &psi;
  FockVector<Real> rotated;
  if (lo.phase != 0.0) {
    rotated = rotate_phase(psi, static_cast<Real>(lo.phase));
    state = &rotated;
  }
  return detail::amplitude_scaled(*state, static_cast<Real>(lo.amplitude),
                                  outcome)
      .abs2();
}

/// P^j_m for a mixed signal state, via eigenvalue-weighted pure amplitudes.
template <typename Real>
Real probability(const FockDensity<Real>& rho, const LocalOscillator& lo,
                 CountOutcome outcome) {
  validate_outcome(outcome);
  const FockDensity<Real>* state = &rho;
  FockDensity<Real> rotated;
  if (lo.phase != 0.0) {
    rotated = rotate_phase(rho, static_cast<Real>(lo.phase));
    state = &rotated;
  }
  const auto parts = detail::pure_components(*state);
  detail::KahanSum<detail::widen_t<Real>> total;
  for (const auto& [w, psi] : parts) {
    total.add(static_cast<detail::widen_t<Real>>(w) *
              static_cast<detail::widen_t<Real>>(
                  detail::amplitude_scaled(psi,
                                           static_cast<Real>(lo.amplitude),
                                           outcome)
                      .abs2()));
  }
  return static_cast<Real>(total.sum);
}

namespace detail {

inline std::vector<CountOutcome> window_outcomes(double lo_amplitude,
                                                 const WindowPolicy& policy) {
  const double mean = lo_amplitude * lo_amplitude;
  const double sigma = lo_amplitude;
  const int two_j_min = std::max(
      0, static_cast<int>(std::floor(mean - policy.c_sigmas * sigma)));
  const int two_j_max =
      static_cast<int>(std::ceil(mean + policy.c_sigmas * sigma));

  std::vector<CountOutcome> outcomes;
  for (int two_j = two_j_min; two_j <= two_j_max; ++two_j) {
    int m_cap = two_j;
    if (policy.two_m_cap) {
      int cap = std::min(*policy.two_m_cap, two_j);
      if (((cap - two_j) % 2) != 0) --cap;  // align parity
      m_cap = std::max(cap, two_j % 2 == 0 ? 0 : 1);
    }
    for (int two_m = -m_cap; two_m <= m_cap; two_m += 2) {
      outcomes.push_back(CountOutcome{two_j, two_m});
    }
  }
  if (outcomes.empty()) {
    throw std::invalid_argument("distribution: window policy selects no "
                                "outcomes");
  }
  return outcomes;
}

/// 1 - (LO Poisson mass guaranteed to land inside [two_j_min, two_j_max]
/// after the signal adds at most `signal_cutoff` photons).
template <typename Real>
Real lo_window_tail(double lo_amplitude, int two_j_min, int two_j_max,
                    int signal_cutoff) {
  const double mean = lo_amplitude * lo_amplitude;
  const int k_min = std::max(0, two_j_min);
  const int k_max = two_j_max - signal_cutoff;
  if (k_max < k_min) return Real(1);
  KahanSum<long double> kept;
  for (int k = k_min; k <= k_max; ++k) {
    kept.add(std::exp(static_cast<long double>(
        log_poisson<double>(k, mean))));
  }
  return static_cast<Real>(
      std::max(0.0L, 1.0L - static_cast<long double>(kept.sum)));
}

/// Geometric-decay estimate of the mass beyond the |two_m| cap, from the two
/// outermost computed probabilities on each side of each two_j slice.
template <typename Real>
Real capped_m_tail_estimate(const std::vector<CountOutcome>& window,
                            const Eigen::Vector<Real, Eigen::Dynamic>& probs) {
  Real estimate = 0;
  size_t i = 0;
  while (i < window.size()) {
    const size_t begin = i;
    const int two_j = window[i].two_j;
    while (i < window.size() && window[i].two_j == two_j) ++i;
    const size_t end = i;  // slice [begin, end) has ascending two_m
    if (end - begin < 2) continue;
    const int dropped_per_side = (two_j - std::abs(window[begin].two_m)) / 2;
    if (dropped_per_side <= 0) continue;
    const auto side = [&](Real edge, Real inner) {
      if (edge <= Real(0)) return Real(0);
      const Real ratio = inner > Real(0) ? edge / inner : Real(1);
      if (ratio < Real(1)) return edge * ratio / (Real(1) - ratio);
      return edge * Real(dropped_per_side);
    };
    estimate += side(probs[begin], probs[begin + 1]);
    estimate += side(probs[end - 1], probs[end - 2]);
  }
  return estimate;
}

template <typename Real>
HomodyneDistribution<Real> distribution_impl(
    const std::vector<std::pair<Real, FockVector<Real>>>& parts,
    int signal_cutoff, const LocalOscillator& lo,
    std::vector<CountOutcome> window,
    const std::optional<WindowPolicy>& policy) {
  HomodyneDistribution<Real> dist;
  dist.lo = lo;
  dist.window = std::move(window);
  const Eigen::Index n = static_cast<Eigen::Index>(dist.window.size());
  dist.probs.resize(n);
  dist.log_probs.resize(n);

  const Real a = static_cast<Real>(lo.amplitude);
  int max_cutoff = 0;
  for (const auto& [w, psi] : parts) {
    max_cutoff = std::max(max_cutoff, psi.cutoff());
  }
  // Contiguous [begin, end) ranges of the window sharing one two_j; the d
  // columns are computed once per range and reused across every two_m.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> slices;
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index end = i;
    while (end < n && dist.window[end].two_j == dist.window[i].two_j) ++end;
    slices.emplace_back(i, end);
    i = end;
  }

  const bool single_pure =
      parts.size() == 1 && parts.front().first == Real(1);
  parallel_for(static_cast<Eigen::Index>(slices.size()), [&](Eigen::Index s) {
    const auto [begin, end] = slices[s];
    const int two_j = dist.window[begin].two_j;
    const auto columns = SliceColumns<Real>::build(
        two_j, std::min(max_cutoff, two_j), a);
    for (Eigen::Index i = begin; i < end; ++i) {
      const int two_m = dist.window[i].two_m;
      if (single_pure) {
        const auto amp =
            amplitude_from_slice(parts.front().second, a, columns, two_m);
        dist.probs[i] = amp.abs2();
        dist.log_probs[i] = amp.abs2_log();
      } else {
        std::vector<Real> logs;
        logs.reserve(parts.size());
        for (const auto& [w, psi] : parts) {
          const auto amp = amplitude_from_slice(psi, a, columns, two_m);
          const Real l = amp.abs2_log();
          if (!std::isinf(l)) logs.push_back(std::log(w) + l);
        }
        dist.log_probs[i] = log_sum_exp(logs);
        dist.probs[i] = std::isinf(dist.log_probs[i])
                            ? Real(0)
                            : std::exp(dist.log_probs[i]);
      }
    }
  });

  KahanSum<detail::widen_t<Real>> mass;
  for (Eigen::Index i = 0; i < n; ++i) {
    mass.add(static_cast<detail::widen_t<Real>>(dist.probs[i]));
  }
  dist.total_mass = static_cast<Real>(mass.sum);

  dist.window_tail_bound =
      lo_window_tail<Real>(lo.amplitude, dist.window.front().two_j,
                           dist.window.back().two_j, signal_cutoff);
  if (policy && policy->two_m_cap) {
    dist.window_tail_bound += capped_m_tail_estimate(dist.window, dist.probs);
  }
  return dist;
}

inline std::vector<CountOutcome> sorted_window(
    std::vector<CountOutcome> window) {
  if (window.empty()) {
    throw std::invalid_argument("distribution_over: empty outcome window");
  }
  for (const CountOutcome& outcome : window) validate_outcome(outcome);
  std::sort(window.begin(), window.end(), [](CountOutcome a, CountOutcome b) {
    return a.two_j != b.two_j ? a.two_j < b.two_j : a.two_m < b.two_m;
  });
  return window;
}

}  // namespace detail

/// Full exact counting distribution of a pure signal over the window.
template <typename Real>
HomodyneDistribution<Real> distribution(const FockVector<Real>& psi,
                                        const LocalOscillator& lo,
                                        const WindowPolicy& policy = {}) {
  FockVector<Real> state = lo.phase != 0.0
                               ? rotate_phase(psi, static_cast<Real>(lo.phase))
                               : psi;
  std::vector<std::pair<Real, FockVector<Real>>> parts;
  parts.emplace_back(Real(1), std::move(state));
  return detail::distribution_impl(parts, psi.cutoff(), lo,
                                   detail::window_outcomes(lo.amplitude,
                                                           policy),
                                   policy);
}

/// Full exact counting distribution of a mixed signal over the window.
template <typename Real>
HomodyneDistribution<Real> distribution(const FockDensity<Real>& rho,
                                        const LocalOscillator& lo,
                                        const WindowPolicy& policy = {}) {
  FockDensity<Real> state = lo.phase != 0.0
                                ? rotate_phase(rho, static_cast<Real>(lo.phase))
                                : rho;
  const auto parts = detail::pure_components(state);
  return detail::distribution_impl(parts, rho.cutoff(), lo,
                                   detail::window_outcomes(lo.amplitude,
                                                           policy),
                                   policy);
}

/// Exact counting probabilities over a caller-chosen outcome set (for
/// example one fixed photon-sum slice).  Outcomes are sorted ascending.
template <typename Real>
HomodyneDistribution<Real> distribution_over(
    const FockVector<Real>& psi, const LocalOscillator& lo,
    std::vector<CountOutcome> window) {
  FockVector<Real> state = lo.phase != 0.0
                               ? rotate_phase(psi, static_cast<Real>(lo.phase))
                               : psi;
  std::vector<std::pair<Real, FockVector<Real>>> parts;
  parts.emplace_back(Real(1), std::move(state));
  return detail::distribution_impl(parts, psi.cutoff(), lo,
                                   detail::sorted_window(std::move(window)),
                                   std::nullopt);
}

template <typename Real>
HomodyneDistribution<Real> distribution_over(
    const FockDensity<Real>& rho, const LocalOscillator& lo,
    std::vector<CountOutcome> window) {
  FockDensity<Real> state = lo.phase != 0.0
                                ? rotate_phase(rho, static_cast<Real>(lo.phase))
                                : rho;
  const auto parts = detail::pure_components(state);
  return detail::distribution_impl(parts, rho.cutoff(), lo,
                                   detail::sorted_window(std::move(window)),
                                   std::nullopt);
}

/// Distribution of the photon-number difference alone: sums over two_j at
/// fixed two_m.  Expects a window carrying near-unit mass.
template <typename Real>
std::map<int, Real> marginal_difference(const HomodyneDistribution<Real>& dist) {
  std::map<int, detail::widen_t<Real>> acc;
  for (size_t i = 0; i < dist.window.size(); ++i) {
    acc[dist.window[i].two_m] +=
        static_cast<detail::widen_t<Real>>(dist.probs[i]);
  }
  std::map<int, Real> out;
  for (const auto& [two_m, p] : acc) out[two_m] = static_cast<Real>(p);
  return out;
}

/// Analytic counting probability for a coherent signal |beta>: the splitter
/// maps coherent inputs to coherent outputs, so the counts are a product of
/// independent Poisson laws with means |A + beta e^{-i phi}|^2 / 2 and
/// |A - beta e^{-i phi}|^2 / 2.
template <typename Real>
Real coherent_oracle(std::complex<Real> beta, const LocalOscillator& lo,
                     CountOutcome outcome) {
  validate_outcome(outcome);
  using Wide = detail::widen_t<Real>;
  const std::complex<Real> rotated =
      beta * std::exp(std::complex<Real>(0, -static_cast<Real>(lo.phase)));
  const Real a = static_cast<Real>(lo.amplitude);
  const Real mean1 = std::norm(std::complex<Real>(a, 0) + rotated) / Real(2);
  const Real mean2 = std::norm(std::complex<Real>(a, 0) - rotated) / Real(2);
  const auto log_pois = [](long long k, Real mean) -> Wide {
    if (mean == Real(0)) {
      return k == 0 ? Wide(0) : -std::numeric_limits<Wide>::infinity();
    }
    return static_cast<Wide>(log_poisson<Real>(k, mean));
  };
  const Wide log_p = log_pois(outcome.count_port1(), mean1) +
                     log_pois(outcome.count_port2(), mean2);
  return std::isinf(log_p) ? Real(0) : static_cast<Real>(std::exp(log_p));
}

/// Independent check of the whole counting pipeline: represents the two-mode
/// input on a photon-capped grid, applies the splitter rotation per
/// photon-sum multiplet by dense exponentiation, and reads the output
/// populations.  Intended for small LO amplitudes.
template <typename Real>
HomodyneDistribution<Real> brute_force_bs_oracle(
    const FockVector<Real>& psi, const LocalOscillator& lo, int cap,
    bool allow_degenerate_lo = false) {
  using Wide = detail::widen_t<Real>;
  using Complex = std::complex<Real>;
  if (cap < 0 || (cap + 1LL) * (cap + 1LL) > 40000) {
    throw std::invalid_argument(
        "brute_force_bs_oracle: cap " + std::to_string(cap) +
        " outside the supported grid ((cap+1)^2 <= 4e4)");
  }
  if (psi.cutoff() > cap) {
    throw std::invalid_argument(
        "brute_force_bs_oracle: signal cutoff exceeds grid cap");
  }
  const Real a = static_cast<Real>(lo.amplitude);
  if (!(a > Real(0)) && !allow_degenerate_lo) {
    throw std::invalid_argument(
        "brute_force_bs_oracle: LO amplitude must be positive (pass "
        "allow_degenerate_lo to bypass)");
  }

  // LO coherent coefficients for alpha = -A e^{i phase}, built natively so
  // the phase handling is independent of the engine's rotation shortcut.
  Eigen::Vector<Complex, Eigen::Dynamic> lo_coeffs(cap + 1);
  if (a == Real(0)) {
    lo_coeffs.setZero();
    lo_coeffs[0] = Real(1);
  } else {
    const Complex alpha_unit =
        -std::exp(Complex(0, static_cast<Real>(lo.phase)));
    const Wide log_a = std::log(static_cast<Wide>(a));
    const Wide half_a2 = Wide(0.5) * static_cast<Wide>(a) * a;
    Complex phase(1, 0);
    for (int n = 0; n <= cap; ++n) {
      const Wide log_mag =
          Wide(n) * log_a - half_a2 - Wide(0.5) * log_factorial<Wide>(n);
      lo_coeffs[n] = phase * static_cast<Real>(std::exp(log_mag));
      phase *= alpha_unit;
    }
    const Real lo_tail = Real(1) - lo_coeffs.squaredNorm();
    if (lo_tail > Real(1e-12)) {
      throw std::invalid_argument(
          "brute_force_bs_oracle: LO truncation tail " +
          std::to_string(double(lo_tail)) + " exceeds 1e-12 at cap " +
          std::to_string(cap));
    }
  }

  constexpr Real kMultipletMassFloor = Real(1e-18);
  HomodyneDistribution<Real> dist;
  dist.lo = lo;
  detail::KahanSum<Wide> kept_mass;
  detail::KahanSum<Wide> out_mass;
  std::vector<Real> probs;

  for (int two_j = 0; two_j <= 2 * cap; ++two_j) {
    Eigen::Vector<Complex, Eigen::Dynamic> in(two_j + 1);
    for (int i = 0; i <= two_j; ++i) {
      const int n1 = i;
      const int n2 = two_j - i;
      in[i] = (n1 <= cap && n2 <= psi.cutoff())
                  ? lo_coeffs[n1] * psi.coeffs[n2]
                  : Complex(0, 0);
    }
    const Real mass = in.squaredNorm();
    if (mass < kMultipletMassFloor) continue;
    kept_mass.add(static_cast<Wide>(mass));

    const Eigen::MatrixXd rot = detail::bs_rotation_matrix(two_j);
    const Eigen::Vector<Complex, Eigen::Dynamic> out =
        rot.cast<Real>() * in;
    for (int i = 0; i <= two_j; ++i) {
      dist.window.push_back(CountOutcome{two_j, -two_j + 2 * i});
      probs.push_back(std::norm(out[i]));
      out_mass.add(static_cast<Wide>(probs.back()));
    }
  }

  dist.probs = Eigen::Map<Eigen::Vector<Real, Eigen::Dynamic>>(
      probs.data(), static_cast<Eigen::Index>(probs.size()));
  dist.log_probs.resize(dist.probs.size());
  for (Eigen::Index i = 0; i < dist.probs.size(); ++i) {
    dist.log_probs[i] = dist.probs[i] > Real(0)
                            ? std::log(dist.probs[i])
                            : -std::numeric_limits<Real>::infinity();
  }
  dist.total_mass = static_cast<Real>(out_mass.sum);
  dist.window_tail_bound =
      static_cast<Real>(std::max(Wide(0), Wide(1) - kept_mass.sum));
  return dist;
}

}  // namespace homodyne

#endif  // HOMODYNE_EXACT_HPP_
