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

#ifndef HOMODYNE_STATES_HPP_
#define HOMODYNE_STATES_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "homodyne/special.hpp"

namespace homodyne {

/// Pure signal state in the Fock basis: coeffs[n] multiplies |n>, n = 0..N.
/// Coefficients beyond the cutoff are semantically zero.
template <typename Real = double>
struct FockVector {
  using Complex = std::complex<Real>;
  Eigen::Vector<Complex, Eigen::Dynamic> coeffs;

  int cutoff() const { return static_cast<int>(coeffs.size()) - 1; }

  Real norm_sq() const { return coeffs.squaredNorm(); }

  void normalize() {
    const Real n2 = norm_sq();
    if (!(n2 > Real(0))) {
      throw std::invalid_argument("FockVector::normalize: zero-norm state");
    }
    coeffs /= std::sqrt(n2);
  }
};

/// Mixed signal state: Hermitian, unit-trace matrix rho_{mn}, 0 <= m,n <= N.
template <typename Real = double>
struct FockDensity {
  using Complex = std::complex<Real>;
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> matrix;

  int cutoff() const { return static_cast<int>(matrix.rows()) - 1; }

  Real trace() const { return matrix.trace().real(); }
};

/// Strong coherent reference beam; its coherent amplitude is -A e^{i phase}.
struct LocalOscillator {
  double amplitude;
  double phase;

  LocalOscillator(double amplitude_in, double phase_in = 0.0)
      : amplitude(amplitude_in), phase(phase_in) {
    if (!(amplitude > 0.0)) {
      throw std::invalid_argument(
          "LocalOscillator: amplitude must be positive, got " +
          std::to_string(amplitude_in));
    }
  }

  /// Bypasses the amplitude > 0 invariant; only the degenerate-splitter
  /// oracle path accepts such an instance.
  static LocalOscillator unchecked(double amplitude_in, double phase_in) {
    LocalOscillator lo(1.0, phase_in);
    lo.amplitude = amplitude_in;
    return lo;
  }
};

/// Evidence (never proof) that a state's Fock coefficients fall off at least
/// as fast as a coherent state of amplitude z, collected at a finite cutoff.
struct RegularityReport {
  double z_tested = 0.0;
  /// max over n of |psi_n| sqrt(n!) / z^n within the cutoff window.
  double max_ratio = 0.0;
  /// Whether the nonzero ratio subsequence is non-increasing over the final
  /// third of the window.
  bool monotone_tail = false;

  bool regular_at_cutoff() const {
    return std::isfinite(max_ratio) && monotone_tail;
  }
};

/// Smallest cutoff a coherent state of modulus |beta| may be truncated at
/// (leaves tail mass below 1e-12).
inline int required_coherent_cutoff(double abs_beta) {
  return static_cast<int>(
      std::ceil(abs_beta * abs_beta + 10.0 * abs_beta + 10.0));
}

/// Default constructor cutoff: every dropped coefficient is below 1e-16 in
/// modulus.  The minimum above only bounds the tail mass; far photon-sum
/// tails of the counting distribution are sensitive to the coefficient tail,
/// which this scan controls directly.
inline int default_coherent_cutoff(double abs_beta) {
  const int required = required_coherent_cutoff(abs_beta);
  if (abs_beta == 0.0) return required;
  const long double log_tol = std::log(1e-16L);
  const long double log_b = std::log(static_cast<long double>(abs_beta));
  const long double half_b2 =
      0.5L * static_cast<long double>(abs_beta) * abs_beta;
  int n = required;
  while (n * log_b - half_b2 - 0.5L * std::lgamma(n + 1.0L) >= log_tol) ++n;
  return n;
}

/// |beta> truncated at `cutoff` and renormalized over the window.
/// cutoff < 0 picks the default safe cutoff.
template <typename Real = double>
FockVector<Real> make_coherent(std::complex<Real> beta, int cutoff = -1) {
  using Wide = detail::widen_t<Real>;
  const Real abs_beta = std::abs(beta);
  const int required = required_coherent_cutoff(static_cast<double>(abs_beta));
  if (cutoff < 0) cutoff = default_coherent_cutoff(double(abs_beta));
  if (cutoff < required) {
    throw std::invalid_argument(
        "make_coherent: cutoff " + std::to_string(cutoff) +
        " too small for |beta| = " + std::to_string(double(abs_beta)) +
        "; required cutoff is " + std::to_string(required));
  }

  FockVector<Real> state;
  state.coeffs.resize(cutoff + 1);
  if (abs_beta == Real(0)) {
    state.coeffs.setZero();
    state.coeffs[0] = Real(1);
    return state;
  }
  const Wide log_abs = std::log(static_cast<Wide>(abs_beta));
  const std::complex<Real> unit = beta / abs_beta;
  const Wide half_b2 = Wide(0.5) * Wide(abs_beta) * Wide(abs_beta);
  std::complex<Real> phase(1, 0);
  for (int n = 0; n <= cutoff; ++n) {
    const Wide log_mag = Wide(n) * log_abs - half_b2 -
                         Wide(0.5) * log_factorial<Wide>(n);
    state.coeffs[n] = phase * static_cast<Real>(std::exp(log_mag));
    phase *= unit;
  }
  state.normalize();
  return state;
}

namespace detail {

// log |psi_{2k}| of the squeezed vacuum, from the closed form
// sqrt(sech r) (tanh r)^k sqrt((2k)!) / (2^k k!).
template <typename Real>
detail::widen_t<Real> squeezed_log_coeff(Real r, int k) {
  using Wide = detail::widen_t<Real>;
  const Wide rw = std::abs(static_cast<Wide>(r));
  if (rw == Wide(0)) {
    return k == 0 ? Wide(0) : -std::numeric_limits<Wide>::infinity();
  }
  return Wide(0.5) * std::log(Wide(1) / std::cosh(rw)) +
         Wide(k) * std::log(std::tanh(rw)) +
         Wide(0.5) * log_factorial<Wide>(2LL * k) -
         Wide(k) * std::log(Wide(2)) -
         log_factorial<Wide>(k);
}

}  // namespace detail

/// Smallest cutoff at which every dropped squeezed-vacuum coefficient is
/// below 1e-14 in modulus.
template <typename Real = double>
int required_squeezed_cutoff(Real r) {
  if (r == Real(0)) return 0;
  const long double log_tol = std::log(1e-14L);
  int k = 0;
  // |psi_{2k}| decreases strictly in k, so the first index below tolerance
  // bounds the whole tail.
  while (detail::squeezed_log_coeff<Real>(r, k) >= log_tol) ++k;
  return 2 * k;
}

/// exp[r (a^2 - a^dag^2) / 2] |0> truncated at `cutoff` and renormalized.
/// Only even Fock coefficients are nonzero; signs alternate as (-tanh r)^k.
template <typename Real = double>
FockVector<Real> make_squeezed_vacuum(Real r, int cutoff = -1) {
  const int required = required_squeezed_cutoff<Real>(r);
  if (cutoff < 0) cutoff = required;
  if (cutoff < required) {
    throw std::invalid_argument(
        "make_squeezed_vacuum: cutoff " + std::to_string(cutoff) +
        " too small for r = " + std::to_string(double(r)) +
        "; required cutoff is " + std::to_string(required));
  }
  FockVector<Real> state;
  state.coeffs.setZero(cutoff + 1);
  const int sign_flip = (r > Real(0)) ? -1 : 1;  // sign of (-tanh r)
  int sign = 1;
  for (int k = 0; 2 * k <= cutoff; ++k) {
    const auto log_mag = detail::squeezed_log_coeff<Real>(r, k);
    state.coeffs[2 * k] =
        static_cast<Real>(sign) * static_cast<Real>(std::exp(log_mag));
    sign *= sign_flip;
  }
  state.normalize();
  return state;
}

/// Number state |n>.
template <typename Real = double>
FockVector<Real> make_number(int n, int cutoff = -1) {
  if (n < 0) throw std::invalid_argument("make_number: n must be >= 0");
  if (cutoff < 0) cutoff = n;
  if (n > cutoff) {
    throw std::invalid_argument("make_number: n = " + std::to_string(n) +
                                " exceeds cutoff " + std::to_string(cutoff));
  }
  FockVector<Real> state;
  state.coeffs.setZero(cutoff + 1);
  state.coeffs[n] = Real(1);
  return state;
}

/// |psi><psi| as an explicit matrix.
template <typename Real>
FockDensity<Real> to_density(const FockVector<Real>& psi) {
  FockDensity<Real> rho;
  rho.matrix = psi.coeffs * psi.coeffs.adjoint();
  return rho;
}

/// Convex mixture sum_i p_i rho_i, embedded at the largest cutoff.
template <typename Real>
FockDensity<Real> mix(
    const std::vector<std::pair<Real, FockDensity<Real>>>& components) {
  if (components.empty()) {
    throw std::invalid_argument("mix: empty component list");
  }
  Real weight_sum = 0;
  int max_cutoff = 0;
  for (const auto& [w, rho] : components) {
    if (w < Real(0)) {
      throw std::invalid_argument("mix: negative weight " +
                                  std::to_string(double(w)));
    }
    weight_sum += w;
    max_cutoff = std::max(max_cutoff, rho.cutoff());
  }
  if (std::abs(weight_sum - Real(1)) > Real(1e-12)) {
    throw std::invalid_argument("mix: weights sum to " +
                                std::to_string(double(weight_sum)) +
                                ", expected 1 within 1e-12");
  }
  FockDensity<Real> out;
  out.matrix.setZero(max_cutoff + 1, max_cutoff + 1);
  for (const auto& [w, rho] : components) {
    const int d = rho.cutoff() + 1;
    out.matrix.topLeftCorner(d, d) += w * rho.matrix;
  }
  return out;
}

/// rho'_{mn} = rho_{mn} / (sum_{i<=N} rho_{ii}) for m,n <= N, zero beyond;
/// renormalization keeps the truncated state a state.
template <typename Real>
FockDensity<Real> truncate_density(const FockDensity<Real>& rho, int n_keep) {
  if (n_keep < 0 || n_keep > rho.cutoff()) {
    throw std::invalid_argument("truncate_density: N = " +
                                std::to_string(n_keep) +
                                " outside [0, cutoff]");
  }
  const int d = n_keep + 1;
  const Real retained = rho.matrix.topLeftCorner(d, d).trace().real();
  if (!(retained > Real(0))) {
    throw std::invalid_argument(
        "truncate_density: retained trace vanishes at N = " +
        std::to_string(n_keep));
  }
  FockDensity<Real> out;
  out.matrix = rho.matrix.topLeftCorner(d, d) / retained;
  return out;
}

/// Heisenberg phase-space rotation by phi: psi_n -> e^{-i n phi} psi_n, so a
/// coherent state |beta> maps to |beta e^{-i phi}> up to a global phase.
/// Photon statistics are untouched; the quadrature distribution rotates.
template <typename Real>
FockVector<Real> rotate_phase(const FockVector<Real>& psi, Real phi) {
  FockVector<Real> out = psi;
  std::complex<Real> factor(1, 0);
  const std::complex<Real> step = std::exp(std::complex<Real>(0, -phi));
  for (int n = 0; n <= psi.cutoff(); ++n) {
    out.coeffs[n] = psi.coeffs[n] * factor;
    factor *= step;
  }
  return out;
}

template <typename Real>
FockDensity<Real> rotate_phase(const FockDensity<Real>& rho, Real phi) {
  FockDensity<Real> out = rho;
  const int d = rho.cutoff() + 1;
  Eigen::Vector<std::complex<Real>, Eigen::Dynamic> phases(d);
  std::complex<Real> factor(1, 0);
  const std::complex<Real> step = std::exp(std::complex<Real>(0, -phi));
  for (int n = 0; n < d; ++n) {
    phases[n] = factor;
    factor *= step;
  }
  out.matrix = phases.asDiagonal() * rho.matrix *
               phases.conjugate().asDiagonal();
  return out;
}

/// Tr(rho n-hat) / <psi| n-hat |psi>.
template <typename Real>
Real mean_photon_number(const FockVector<Real>& psi) {
  Real total = 0;
  for (int n = 0; n <= psi.cutoff(); ++n) {
    total += Real(n) * std::norm(psi.coeffs[n]);
  }
  return total;
}

template <typename Real>
Real mean_photon_number(const FockDensity<Real>& rho) {
  Real total = 0;
  for (int n = 0; n <= rho.cutoff(); ++n) {
    total += Real(n) * rho.matrix(n, n).real();
  }
  return total;
}

/// Ratio-shape classifier for coefficient decay against a coherent state of
/// amplitude z.  Zero coefficients are skipped when judging monotonicity, so
/// parity-sparse states are compared along their support.
template <typename Real>
RegularityReport regularity_report(const FockVector<Real>& psi, Real z) {
  if (!(z > Real(0))) {
    throw std::invalid_argument("regularity_report: z must be positive");
  }
  using Wide = detail::widen_t<Real>;
  const int n_max = psi.cutoff();
  const Wide log_z = std::log(static_cast<Wide>(z));

  std::vector<double> ratios(n_max + 1, 0.0);
  double max_ratio = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const Real mag = std::abs(psi.coeffs[n]);
    if (mag == Real(0)) continue;
    const Wide log_ratio = std::log(static_cast<Wide>(mag)) +
                           Wide(0.5) * static_cast<Wide>(log_factorial<Real>(n)) -
                           Wide(n) * log_z;
    ratios[n] = static_cast<double>(std::exp(log_ratio));
    max_ratio = std::max(max_ratio, ratios[n]);
  }

  const int tail_start = n_max - n_max / 3;
  bool monotone = true;
  double prev = -1.0;
  for (int n = tail_start; n <= n_max; ++n) {
    if (ratios[n] == 0.0) continue;  // compare along the support only
    if (prev >= 0.0 && ratios[n] > prev * (1.0 + 1e-9)) {
      monotone = false;
      break;
    }
    prev = ratios[n];
  }

  RegularityReport report;
  report.z_tested = static_cast<double>(z);
  report.max_ratio = max_ratio;
  report.monotone_tail = monotone;
  return report;
}

}  // namespace homodyne

#endif  // HOMODYNE_STATES_HPP_
