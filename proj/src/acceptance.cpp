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

#include "homodyne/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "homodyne/exact.hpp"
#include "homodyne/povm.hpp"
#include "homodyne/scenario.hpp"
#include "homodyne/states.hpp"
#include "homodyne/wigner.hpp"

namespace homodyne::acceptance {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string eng(double v) {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific << v;
  return out.str();
}

std::complex<double> parse_complex(const json& entry) {
  if (entry.is_number()) return {entry.get<double>(), 0.0};
  return {entry.at(0).get<double>(), entry.at(1).get<double>()};
}

FockVector<double> parse_signal(const json& spec) {
  const std::string type = spec.at("type").get<std::string>();
  if (type == "coherent") {
    return make_coherent(parse_complex(spec.at("beta")));
  }
  if (type == "number") return make_number(spec.at("n").get<int>());
  if (type == "squeezed_vacuum") {
    return make_squeezed_vacuum(spec.at("r").get<double>());
  }
  throw std::invalid_argument("acceptance fixture: unknown signal type '" +
                              type + "'");
}

// --- criterion 1: exact engine vs the coherent product-Poisson law ---------

CriterionResult coherent_oracle_equivalence(const json& fixture) {
  CriterionResult result{1, "coherent-oracle-equivalence", false, "", 0.0};
  constexpr double kRelTol = 1e-9;
  constexpr double kProbFloor = 1e-12;
  constexpr double kTimeLimit = 60.0;

  const double a = fixture.at("A").get<double>();
  const double c_sigmas = fixture.at("window_sigmas").get<double>();

  double max_rel = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& beta_entry : fixture.at("betas")) {
    const std::complex<double> beta = parse_complex(beta_entry);
    const auto psi = make_coherent(beta);
    for (const auto& phase_entry : fixture.at("phases")) {
      const LocalOscillator lo(a, phase_entry.get<double>());
      const auto dist = distribution(psi, lo, WindowPolicy{c_sigmas, {}});
      for (size_t i = 0; i < dist.window.size(); ++i) {
        const double reference = coherent_oracle(beta, lo, dist.window[i]);
        if (reference <= kProbFloor) continue;
        max_rel = std::max(
            max_rel, std::abs(dist.probs[static_cast<Eigen::Index>(i)] -
                              reference) /
                         reference);
      }
    }
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  result.passed = max_rel <= kRelTol && result.seconds <= kTimeLimit;
  result.detail = "max rel err " + eng(max_rel) + " (tol " + eng(kRelTol) +
                  ", P > " + eng(kProbFloor) + ")";
  return result;
}

// --- criterion 2: exact engine vs the dense two-mode rotation --------------

CriterionResult brute_force_triangle(const json& fixture) {
  CriterionResult result{2, "brute-force-triangle", false, "", 0.0};
  constexpr double kAbsTol = 1e-10;
  constexpr double kTimeLimit = 30.0;

  const int cap = fixture.at("cap").get<int>();
  double sup = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& a_entry : fixture.at("amplitudes")) {
    const LocalOscillator lo(a_entry.get<double>(), 0.0);
    for (const auto& signal : fixture.at("signals")) {
      const auto psi = parse_signal(signal);
      const auto brute = brute_force_bs_oracle(psi, lo, cap);
      for (size_t i = 0; i < brute.window.size(); ++i) {
        const double engine = probability(psi, lo, brute.window[i]);
        sup = std::max(sup,
                       std::abs(engine -
                                brute.probs[static_cast<Eigen::Index>(i)]));
      }
    }
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  result.passed = sup <= kAbsTol && result.seconds <= kTimeLimit;
  result.detail = "sup |exact - brute| " + eng(sup) + " (tol " + eng(kAbsTol) +
                  ")";
  return result;
}

// --- criterion 3: recursion vs dense rotation, column unitarity ------------

CriterionResult wigner_recursion(const json& fixture) {
  CriterionResult result{3, "wigner-d-validation", false, "", 0.0};
  constexpr double kAbsTol = 1e-10;

  const int oracle_max = fixture.at("oracle_two_j_max").get<int>();
  const auto start = std::chrono::steady_clock::now();

  double max_err = 0.0;
  for (int two_j = 0; two_j <= oracle_max; ++two_j) {
    const Eigen::MatrixXd reference = wigner_d_oracle(two_j);
    for (int col = 0; col <= two_j; ++col) {
      const auto column = wigner_d_pi2<double>(two_j, -two_j + 2 * col);
      max_err = std::max(
          max_err, (column.values - reference.col(col)).cwiseAbs().maxCoeff());
    }
  }

  double max_unit = 0.0;
  std::vector<int> ladder;
  for (int two_j = 0; two_j <= oracle_max; ++two_j) ladder.push_back(two_j);
  for (const auto& entry : fixture.at("unitarity_two_j")) {
    ladder.push_back(entry.get<int>());
  }
  for (int two_j : ladder) {
    for (int col = 0; col <= two_j; ++col) {
      const auto column = wigner_d_pi2<double>(two_j, -two_j + 2 * col);
      max_unit = std::max(max_unit,
                          std::abs(column.values.squaredNorm() - 1.0));
    }
  }

  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  result.passed = max_err <= kAbsTol && max_unit <= kAbsTol;
  result.detail = "max |recursion - oracle| " + eng(max_err) +
                  ", max |column norm - 1| " + eng(max_unit) + " (tol " +
                  eng(kAbsTol) + ")";
  return result;
}

// --- criterion 4: window mass accounting ------------------------------------

CriterionResult normalization(const json& fixture) {
  CriterionResult result{4, "window-normalization", false, "", 0.0};
  constexpr double kMassTol = 1e-6;

  const double c_sigmas = fixture.at("window_sigmas").get<double>();
  double worst = 1.0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& a_entry : fixture.at("amplitudes")) {
    const LocalOscillator lo(a_entry.get<double>(), 0.0);
    for (const auto& signal : fixture.at("signals")) {
      const auto psi = parse_signal(signal);
      const auto dist = distribution(psi, lo, WindowPolicy{c_sigmas, {}});
      worst = std::min(worst, static_cast<double>(dist.total_mass));
    }
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  result.passed = worst >= 1.0 - kMassTol;
  result.detail = "min window mass " + eng(worst) + " (>= 1 - " +
                  eng(kMassTol) + ")";
  return result;
}

// --- criterion 5: strong-LO quadrature limit ---------------------------------

CriterionResult asymptotic_convergence(const json& fixture) {
  CriterionResult result{5, "asymptotic-convergence", false, "", 0.0};
  constexpr double kPeakFraction = 0.05;

  const auto psi = parse_signal(fixture.at("signal"));
  const double c_sigmas = fixture.at("window_sigmas").get<double>();

  std::vector<double> sups;
  double final_peak = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& a_entry : fixture.at("amplitudes")) {
    const LocalOscillator lo(a_entry.get<double>(), 0.0);
    const auto dist = distribution(psi, lo, WindowPolicy{c_sigmas, {}});
    double sup = 0.0, peak = 0.0;
    for (size_t i = 0; i < dist.window.size(); ++i) {
      // x = m/sqrt(j) is undefined at two_j = 0; that slice carries mass
      // ~e^{-A^2} and is excluded from the comparison grid.
      if (dist.window[i].two_j == 0) continue;
      const double exact = dist.probs[static_cast<Eigen::Index>(i)];
      const double approx = asymptotic_probability(
          psi, lo, dist.window[i], XConvention::m_over_sqrt_j);
      sup = std::max(sup, std::abs(exact - approx));
      peak = std::max(peak, exact);
    }
    sups.push_back(sup);
    final_peak = peak;
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  bool decreasing = true;
  for (size_t i = 1; i < sups.size(); ++i) {
    decreasing = decreasing && sups[i] < sups[i - 1];
  }
  const double final_fraction = sups.back() / final_peak;
  result.passed = decreasing && final_fraction <= kPeakFraction;
  std::string sequence;
  for (double s : sups) sequence += eng(s) + " ";
  result.detail = "sup errors " + sequence + (decreasing ? "(decreasing)"
                                                         : "(NOT decreasing)") +
                  ", final/peak " + eng(final_fraction) + " (tol " +
                  eng(kPeakFraction) + ")";
  return result;
}

// --- criterion 6: correction-series order sweep ------------------------------

CriterionResult series_orders_criterion(const json& fixture) {
  CriterionResult result{6, "series-order-convergence", false, "", 0.0};
  constexpr double kOrder4Fraction = 0.25;
  constexpr double kTimeLimit = 300.0;

  const auto start = std::chrono::steady_clock::now();
  bool all_monotone = true;
  bool fraction_ok = true;
  std::string detail;
  for (const auto& entry : fixture.at("scenarios")) {
    const char variant = entry.at("preset").get<std::string>().at(0);
    const auto config = scenario::figure2_preset(variant);
    const auto psi = config.state.build_pure();
    const LocalOscillator lo = config.lo();
    const int two_j = *config.two_j;
    int cap = std::min(two_j, *config.window.two_m_cap);
    if (((cap - two_j) % 2) != 0) --cap;

    double sup[3] = {0.0, 0.0, 0.0};
    const int orders[3] = {0, 2, 4};
    for (int two_m = -cap; two_m <= cap; two_m += 2) {
      const CountOutcome outcome{two_j, two_m};
      const double exact = probability(psi, lo, outcome);
      for (int k = 0; k < 3; ++k) {
        sup[k] = std::max(
            sup[k], std::abs(series_probability(psi, lo, outcome,
                                                SeriesOrder{orders[k]}) -
                             exact));
      }
    }
    const bool monotone = sup[0] > sup[1] && sup[1] > sup[2];
    all_monotone = all_monotone && monotone;
    const bool requires_fraction = entry.value("order4_within_quarter", false);
    if (requires_fraction) {
      fraction_ok = fraction_ok && sup[2] <= kOrder4Fraction * sup[0];
    }
    detail += std::string(1, variant) + ": e0=" + eng(sup[0]) +
              " e2=" + eng(sup[1]) + " e4=" + eng(sup[2]) + "; ";
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  result.passed =
      all_monotone && fraction_ok && result.seconds <= kTimeLimit;
  result.detail = detail + (all_monotone ? "monotone" : "NOT monotone") +
                  ", order-4/order-0 bound " +
                  (fraction_ok ? "met" : "VIOLATED");
  return result;
}

// --- criterion 7: coherent-state matrix elements -----------------------------

CriterionResult coherent_matrix_elements(const json& fixture) {
  CriterionResult result{7, "coherent-matrix-elements", false, "", 0.0};
  constexpr double kAbsTol = 1e-12;
  constexpr int kMaxPower = 4;

  double max_err = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& gamma_entry : fixture.at("gammas")) {
    const std::complex<double> gamma = parse_complex(gamma_entry);
    const auto rho = to_density(make_coherent(gamma));
    for (const auto& x_entry : fixture.at("x_values")) {
      const double x = x_entry.get<double>();
      for (int m = 0; m <= kMaxPower; ++m) {
        for (int n = 0; n <= kMaxPower; ++n) {
          const std::complex<double> measured =
              quadrature_matrix_element(rho, m, n, x);
          const double gauss =
              std::exp(-std::pow(x - std::sqrt(2.0) * gamma.real(), 2)) /
              std::sqrt(M_PI);
          const std::complex<double> expected =
              std::pow(gamma, m) * std::pow(std::conj(gamma), n) * gauss;
          max_err = std::max(max_err, std::abs(measured - expected));
        }
      }
    }
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  result.passed = max_err <= kAbsTol;
  result.detail = "max abs err " + eng(max_err) + " (tol " + eng(kAbsTol) +
                  ") over powers <= " + std::to_string(kMaxPower);
  return result;
}

// --- criterion 8: photon-difference marginal ---------------------------------

CriterionResult difference_marginal(const json& fixture) {
  CriterionResult result{8, "difference-marginal-law", false, "", 0.0};
  constexpr double kPeakFraction = 0.02;

  const auto psi = parse_signal(fixture.at("signal"));
  const double c_sigmas = fixture.at("window_sigmas").get<double>();

  std::vector<double> ratios;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& a_entry : fixture.at("amplitudes")) {
    const double a = a_entry.get<double>();
    const LocalOscillator lo(a, 0.0);
    const auto dist = distribution(psi, lo, WindowPolicy{c_sigmas, {}});
    const auto marginal = marginal_difference(dist);
    double sup = 0.0, peak = 0.0;
    const auto u_cache = [&psi](double x) {
      const auto table = hermite_gaussian_table(psi.cutoff(), x);
      std::complex<double> projection{0.0, 0.0};
      for (int n = 0; n <= psi.cutoff(); ++n) {
        projection += psi.coeffs[n] * table[n];
      }
      return std::norm(projection);
    };
    for (const auto& [two_m, p] : marginal) {
      const double x = two_m / (std::sqrt(2.0) * a);
      const double reference = u_cache(x) / (std::sqrt(2.0) * a);
      sup = std::max(sup, std::abs(p - reference));
      peak = std::max(peak, p);
    }
    ratios.push_back(sup / peak);
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  bool decreasing = true;
  for (size_t i = 1; i < ratios.size(); ++i) {
    decreasing = decreasing && ratios[i] < ratios[i - 1];
  }
  result.passed = decreasing && ratios.back() <= kPeakFraction;
  std::string sequence;
  for (double r : ratios) sequence += eng(r) + " ";
  result.detail = "sup/peak " + sequence +
                  (decreasing ? "(decreasing)" : "(NOT decreasing)") +
                  ", final tol " + eng(kPeakFraction);
  return result;
}

// --- criterion 9: first-correction scaling with A ----------------------------

CriterionResult strong_lo_scaling(const json& fixture) {
  CriterionResult result{9, "strong-lo-scaling", false, "", 0.0};
  constexpr double kExponent = -1.0;
  constexpr double kExponentTol = 0.2;

  const auto psi = parse_signal(fixture.at("signal"));
  std::vector<double> log_a, log_ratio;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& a_entry : fixture.at("amplitudes")) {
    const double a = a_entry.get<double>();
    const auto report = strong_lo_report(psi, LocalOscillator(a, 0.0));
    log_a.push_back(std::log(a));
    log_ratio.push_back(std::log(report.order2_over_order0));
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  const size_t n = log_a.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += log_a[i];
    sy += log_ratio[i];
    sxx += log_a[i] * log_a[i];
    sxy += log_a[i] * log_ratio[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  result.passed = std::abs(slope - kExponent) <= kExponentTol;
  result.detail = "fitted exponent " + eng(slope) + " (target " +
                  eng(kExponent) + " +/- " + eng(kExponentTol) + ")";
  return result;
}

// --- criterion 10: byte-stable output ----------------------------------------

CriterionResult determinism(const json& fixture) {
  CriterionResult result{10, "deterministic-output", false, "", 0.0};
  const auto start = std::chrono::steady_clock::now();

  bool equal = true;
  for (const auto& entry : fixture.at("presets")) {
    const char variant = entry.get<std::string>().at(0);
    const auto config = scenario::figure2_preset(variant);
    const auto first = scenario::run_scenario(config);
    const auto second = scenario::run_scenario(config);
    equal = equal && scenario::to_csv(first) == scenario::to_csv(second) &&
            scenario::to_json(first) == scenario::to_json(second);
  }
  // a window scenario exercises the parallel evaluation path
  {
    scenario::ScenarioConfig config;
    config.state.type = scenario::StateSpec::Type::coherent;
    config.state.beta = {1.0, 0.0};
    config.lo_amplitude = fixture.at("window_A").get<double>();
    config.window.c_sigmas = 6.0;
    config.engines = {scenario::EngineKind::exact,
                      scenario::EngineKind::asymptotic};
    const auto first = scenario::run_scenario(config);
    const auto second = scenario::run_scenario(config);
    equal = equal && scenario::to_csv(first) == scenario::to_csv(second) &&
            scenario::to_json(first) == scenario::to_json(second);
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  result.passed = equal;
  result.detail = equal ? "repeated runs byte-identical"
                        : "outputs differ between runs";
  return result;
}

using Runner = std::function<CriterionResult(const json&)>;

const std::map<int, std::pair<std::string, Runner>>& registry() {
  static const std::map<int, std::pair<std::string, Runner>> table = {
      {1, {"c01_coherent_oracle.json", coherent_oracle_equivalence}},
      {2, {"c02_brute_force_triangle.json", brute_force_triangle}},
      {3, {"c03_wigner_recursion.json", wigner_recursion}},
      {4, {"c04_normalization.json", normalization}},
      {5, {"c05_asymptotic_convergence.json", asymptotic_convergence}},
      {6, {"c06_series_orders.json", series_orders_criterion}},
      {7, {"c07_coherent_matrix_elements.json", coherent_matrix_elements}},
      {8, {"c08_difference_marginal.json", difference_marginal}},
      {9, {"c09_strong_lo_scaling.json", strong_lo_scaling}},
      {10, {"c10_determinism.json", determinism}},
  };
  return table;
}

json load_fixture(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("acceptance: missing fixture config " +
                                path.string());
  }
  json doc;
  in >> doc;
  return doc;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const Options& options) {
  const fs::path dir(options.config_dir);
  if (!fs::is_directory(dir)) {
    throw std::invalid_argument("acceptance: config directory '" +
                                options.config_dir + "' does not exist");
  }
  if (fs::begin(fs::directory_iterator(dir)) ==
      fs::end(fs::directory_iterator(dir))) {
    throw std::invalid_argument("acceptance: config directory '" +
                                options.config_dir + "' is empty");
  }

  if (options.corrupt_wigner_seed) {
    testing::set_wigner_seed_perturbation(1e-6);
  }

  std::vector<CriterionResult> results;
  for (const auto& [id, entry] : registry()) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), id) ==
            options.only.end()) {
      continue;
    }
    const json fixture = load_fixture(dir / entry.first);
    results.push_back(entry.second(fixture));
  }

  if (options.corrupt_wigner_seed) {
    testing::set_wigner_seed_perturbation(0.0);
  }
  return results;
}

bool report(const std::vector<CriterionResult>& results, std::ostream& out) {
  bool all_passed = true;
  for (const CriterionResult& r : results) {
    out << (r.passed ? "[PASS]" : "[FAIL]") << " criterion " << r.id << " "
        << r.name << ": " << r.detail << " [" << std::fixed
        << std::setprecision(1) << r.seconds << "s]\n";
    out.unsetf(std::ios_base::floatfield);
    all_passed = all_passed && r.passed;
  }
  out << (all_passed ? "ACCEPTANCE: all criteria passed"
                     : "ACCEPTANCE: criteria FAILED")
      << " (" << results.size() << " run)\n";
  return all_passed;
}

}  // namespace homodyne::acceptance
