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

#ifndef HOMODYNE_SCENARIO_HPP_
#define HOMODYNE_SCENARIO_HPP_

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homodyne/exact.hpp"
#include "homodyne/povm.hpp"
#include "homodyne/states.hpp"

namespace homodyne::scenario {

enum class EngineKind { exact, asymptotic, series };

/// Declarative description of a signal state, as read from a config file.
struct StateSpec {
  enum class Type { coherent, squeezed_vacuum, number, fock_vector, mixture };
  Type type = Type::coherent;
  std::complex<double> beta{0.0, 0.0};
  double squeeze_r = 0.0;
  int number_n = 0;
  std::vector<std::complex<double>> coeffs;
  std::vector<std::pair<double, StateSpec>> components;
  std::optional<int> cutoff;

  bool pure() const { return type != Type::mixture; }
  FockVector<double> build_pure() const;
  FockDensity<double> build_density() const;
};

struct OutputSpec {
  std::string path;             // empty = stdout
  std::string format = "csv";   // csv | json
};

struct ScenarioConfig {
  StateSpec state;
  double lo_amplitude = 1.0;
  double lo_phase = 0.0;
  std::optional<int> two_j;     // fixed photon-sum slice; otherwise window
  WindowPolicy window;
  std::vector<EngineKind> engines;
  std::vector<int> series_orders;
  XConvention x_convention = XConvention::sqrt2_m_over_A;
  OutputSpec output;

  LocalOscillator lo() const { return LocalOscillator(lo_amplitude, lo_phase); }
};

/// Parses and validates a scenario document; errors name the offending field.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

/// Bundled single-slice demonstration scenarios at A = 20:
/// 'a' coherent amplitude 2 (photon sum 380), 'b' squeezed vacuum r = 1.5
/// (sum 439), 'c' number state |6> (sum 367); exact plus series orders
/// 0, 2, 4 over the |x| <= 8 band.
ScenarioConfig figure2_preset(char which);

struct ResultRow {
  int two_j = 0;
  int two_m = 0;
  double x = 0.0;
  std::optional<double> p_exact;
  std::optional<double> log_p_exact;  // unset when p_exact is an exact zero
  std::optional<double> p_asymptotic;
  std::map<int, double> p_series;     // keyed by order
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<ResultRow> rows;
  bool has_exact = false;
  bool has_asymptotic = false;
  std::vector<int> orders;
};

/// Evaluates every requested engine over the configured outcome set.
/// Rows are emitted ascending in (two_j, two_m).
ResultTable run_scenario(const ScenarioConfig& config);

std::string to_csv(const ResultTable& table);
std::string to_json(const ResultTable& table);

/// Writes the table to config.output (or the override path), returning the
/// path written, or "-" for stdout.
std::string write_result(const ResultTable& table, const OutputSpec& output);

}  // namespace homodyne::scenario

#endif  // HOMODYNE_SCENARIO_HPP_
