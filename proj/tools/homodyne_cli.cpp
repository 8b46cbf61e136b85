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

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "homodyne/acceptance.hpp"
#include "homodyne/exact.hpp"
#include "homodyne/scenario.hpp"
#include "homodyne/states.hpp"

namespace {

using homodyne::scenario::EngineKind;
using homodyne::scenario::ScenarioConfig;

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<int> two_j;
  std::optional<double> window_sigmas;
  std::string orders_csv;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags, bool config_required) {
  auto* config = cmd->add_option("--config", flags->config_path,
                                 "scenario config file (JSON)");
  if (config_required) config->required();
  cmd->add_option("--out", flags->out_path,
                  "output file path (default: from config, else stdout)");
  cmd->add_option("--format", flags->format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--two-j", flags->two_j,
                  "fix the photon sum 2j (overrides config)");
  cmd->add_option("--window-sigmas", flags->window_sigmas,
                  "photon-sum window half-width in LO standard deviations");
  cmd->add_option("--orders", flags->orders_csv,
                  "comma-separated even series orders, e.g. 0,2,4");
}

std::vector<int> parse_orders(const std::string& csv) {
  std::vector<int> orders;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) orders.push_back(std::stoi(token));
  }
  return orders;
}

void apply_overrides(ScenarioConfig* config, const CommonFlags& flags,
                     EngineKind engine) {
  config->engines = {engine};
  if (engine != EngineKind::series) config->series_orders.clear();
  if (flags.two_j) config->two_j = *flags.two_j;
  if (flags.window_sigmas) config->window.c_sigmas = *flags.window_sigmas;
  if (!flags.orders_csv.empty()) {
    config->series_orders = parse_orders(flags.orders_csv);
    std::sort(config->series_orders.begin(), config->series_orders.end());
  }
  if (engine == EngineKind::series && config->series_orders.empty()) {
    throw std::invalid_argument(
        "series: no orders given (use --orders or the config's "
        "series_orders)");
  }
  if (!flags.out_path.empty()) config->output.path = flags.out_path;
  if (!flags.format.empty()) config->output.format = flags.format;
}

int run_engine_command(const CommonFlags& flags, EngineKind engine) {
  ScenarioConfig config = homodyne::scenario::load_scenario(flags.config_path);
  apply_overrides(&config, flags, engine);
  const auto table = homodyne::scenario::run_scenario(config);
  const std::string written =
      homodyne::scenario::write_result(table, config.output);
  if (written != "-") {
    std::cerr << "wrote " << table.rows.size() << " rows to " << written
              << "\n";
  }
  return 0;
}

int run_figure2(char variant, const CommonFlags& flags) {
  ScenarioConfig config = homodyne::scenario::figure2_preset(variant);
  if (flags.two_j) config.two_j = *flags.two_j;
  if (!flags.orders_csv.empty()) {
    config.series_orders = parse_orders(flags.orders_csv);
    std::sort(config.series_orders.begin(), config.series_orders.end());
  }
  if (!flags.out_path.empty()) config.output.path = flags.out_path;
  if (!flags.format.empty()) {
    config.output.format = flags.format;
    if (flags.out_path.empty() && flags.format == "json") {
      config.output.path = std::string("figure2_") + variant + ".json";
    }
  }
  const auto table = homodyne::scenario::run_scenario(config);
  const std::string written =
      homodyne::scenario::write_result(table, config.output);
  std::cerr << "wrote " << table.rows.size() << " rows to " << written << "\n";
  return 0;
}

// Cross-validates the exact engine against both independent references on
// small problems: the coherent product-Poisson law and the dense two-mode
// rotation.
int run_oracle_check() {
  using namespace homodyne;
  constexpr double kTol = 1e-10;
  double worst = 0.0;

  for (double a : {1.0, 1.5}) {
    const LocalOscillator lo(a, 0.0);
    for (std::complex<double> beta :
         {std::complex<double>(0.0, 0.0), std::complex<double>(0.5, 0.0)}) {
      const auto psi = make_coherent(beta);
      const auto brute = brute_force_bs_oracle(psi, lo, 30);
      for (size_t i = 0; i < brute.window.size(); ++i) {
        const auto outcome = brute.window[i];
        const double engine = probability(psi, lo, outcome);
        const double product = coherent_oracle(beta, lo, outcome);
        worst = std::max(
            worst, std::abs(engine - brute.probs[static_cast<Eigen::Index>(i)]));
        worst = std::max(worst, std::abs(engine - product));
      }
    }
  }
  std::cout << "oracle-check: max |engine - reference| = " << worst
            << " (tol " << kTol << ")\n";
  if (worst <= kTol) {
    std::cout << "oracle-check: OK\n";
    return 0;
  }
  std::cout << "oracle-check: FAILED\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Balanced-homodyne photon counting: exact distributions, the "
      "quadrature-projection limit, and its finite-LO correction series"};
  app.require_subcommand(1);

  CommonFlags exact_flags, asymptotic_flags, series_flags, figure_flags;

  auto* exact_cmd = app.add_subcommand(
      "exact", "exact counting probabilities for a scenario config");
  add_common_flags(exact_cmd, &exact_flags, true);

  auto* asymptotic_cmd = app.add_subcommand(
      "asymptotic", "strong-LO quadrature-projection approximation");
  add_common_flags(asymptotic_cmd, &asymptotic_flags, true);

  auto* series_cmd = app.add_subcommand(
      "series", "order-truncated finite-LO correction series");
  add_common_flags(series_cmd, &series_flags, true);

  std::string figure_variant;
  auto* figure_cmd = app.add_subcommand(
      "figure2", "bundled demonstration scenarios (a: coherent, b: squeezed, "
                 "c: number state)");
  figure_cmd->add_option("variant", figure_variant, "a, b or c")
      ->required()
      ->check(CLI::IsMember({"a", "b", "c"}));
  add_common_flags(figure_cmd, &figure_flags, false);

  auto* oracle_cmd = app.add_subcommand(
      "oracle-check", "cross-validate the exact engine against the "
                      "independent references");

  std::string accept_dir = "configs/acceptance";
  std::vector<int> accept_only;
  bool corrupt_seed = false;
  auto* accept_cmd =
      app.add_subcommand("accept", "run the acceptance suite");
  accept_cmd->add_option("--config-dir", accept_dir,
                         "directory holding the acceptance fixture configs");
  accept_cmd->add_option("--only", accept_only,
                         "run only these criterion numbers");
  accept_cmd
      ->add_flag("--corrupt-wigner-seed", corrupt_seed,
                 "fault injection: perturb the d-function recursion seeds "
                 "(negative control; the suite must then fail)")
      ->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (exact_cmd->parsed()) {
      return run_engine_command(exact_flags, EngineKind::exact);
    }
    if (asymptotic_cmd->parsed()) {
      return run_engine_command(asymptotic_flags, EngineKind::asymptotic);
    }
    if (series_cmd->parsed()) {
      return run_engine_command(series_flags, EngineKind::series);
    }
    if (figure_cmd->parsed()) {
      return run_figure2(figure_variant.at(0), figure_flags);
    }
    if (oracle_cmd->parsed()) {
      return run_oracle_check();
    }
    if (accept_cmd->parsed()) {
      homodyne::acceptance::Options options;
      options.config_dir = accept_dir;
      options.only = accept_only;
      options.corrupt_wigner_seed = corrupt_seed;
      const auto results = homodyne::acceptance::run_acceptance(options);
      const bool ok = homodyne::acceptance::report(results, std::cout);
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
