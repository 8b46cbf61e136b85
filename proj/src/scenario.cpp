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

#include "homodyne/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace homodyne::scenario {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// State construction

FockVector<double> StateSpec::build_pure() const {
  const int cut = cutoff.value_or(-1);
  switch (type) {
    case Type::coherent:
      return make_coherent(beta, cut);
    case Type::squeezed_vacuum:
      return make_squeezed_vacuum(squeeze_r, cut);
    case Type::number:
      return make_number(number_n, cut);
    case Type::fock_vector: {
      if (coeffs.empty()) {
        throw std::invalid_argument("state.coeffs: empty coefficient list");
      }
      FockVector<double> psi;
      psi.coeffs.resize(static_cast<Eigen::Index>(coeffs.size()));
      for (size_t i = 0; i < coeffs.size(); ++i) psi.coeffs[i] = coeffs[i];
      psi.normalize();
      return psi;
    }
    case Type::mixture:
      throw std::invalid_argument(
          "state: a mixture has no pure-state representation");
  }
  throw std::logic_error("StateSpec: unknown type");
}

FockDensity<double> StateSpec::build_density() const {
  if (type != Type::mixture) return to_density(build_pure());
  std::vector<std::pair<double, FockDensity<double>>> parts;
  parts.reserve(components.size());
  for (const auto& [weight, spec] : components) {
    parts.emplace_back(weight, spec.build_density());
  }
  return mix(parts);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument("scenario config: field '" + field + "': " +
                              what);
}

const json& require(const json& doc, const std::string& field,
                    const std::string& context) {
  if (!doc.contains(field)) fail(context + field, "missing");
  return doc.at(field);
}

double require_number(const json& doc, const std::string& field,
                      const std::string& context) {
  const json& v = require(doc, field, context);
  if (!v.is_number()) fail(context + field, "expected a number");
  return v.get<double>();
}

StateSpec parse_state(const json& doc, const std::string& context) {
  if (!doc.is_object()) fail(context, "expected an object");
  StateSpec spec;
  const std::string type = require(doc, "type", context).get<std::string>();
  if (type == "coherent") {
    spec.type = StateSpec::Type::coherent;
    const double re = require_number(doc, "beta_re", context);
    const double im = doc.value("beta_im", 0.0);
    spec.beta = {re, im};
  } else if (type == "squeezed_vacuum") {
    spec.type = StateSpec::Type::squeezed_vacuum;
    spec.squeeze_r = require_number(doc, "r", context);
  } else if (type == "number") {
    spec.type = StateSpec::Type::number;
    spec.number_n = require(doc, "n", context).get<int>();
  } else if (type == "fock_vector") {
    spec.type = StateSpec::Type::fock_vector;
    const json& arr = require(doc, "coeffs", context);
    if (!arr.is_array() || arr.empty()) {
      fail(context + "coeffs", "expected a non-empty array of [re, im] pairs");
    }
    for (const auto& entry : arr) {
      if (entry.is_number()) {
        spec.coeffs.emplace_back(entry.get<double>(), 0.0);
      } else if (entry.is_array() && entry.size() == 2) {
        spec.coeffs.emplace_back(entry[0].get<double>(),
                                 entry[1].get<double>());
      } else {
        fail(context + "coeffs", "entries must be numbers or [re, im] pairs");
      }
    }
  } else if (type == "mixture") {
    spec.type = StateSpec::Type::mixture;
    const json& comps = require(doc, "components", context);
    if (!comps.is_array() || comps.empty()) {
      fail(context + "components", "expected a non-empty array");
    }
    for (size_t i = 0; i < comps.size(); ++i) {
      const std::string sub =
          context + "components[" + std::to_string(i) + "].";
      const double weight = require_number(comps[i], "weight", sub);
      spec.components.emplace_back(
          weight, parse_state(require(comps[i], "state", sub), sub + "state."));
    }
  } else {
    fail(context + "type", "unknown state type '" + type + "'");
  }
  if (doc.contains("cutoff")) spec.cutoff = doc.at("cutoff").get<int>();
  return spec;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario config: ") + e.what());
  }

  ScenarioConfig config;
  config.state = parse_state(require(doc, "state", ""), "state.");

  const json& lo = require(doc, "lo", "");
  config.lo_amplitude = require_number(lo, "A", "lo.");
  config.lo_phase = lo.value("phase", 0.0);
  if (!(config.lo_amplitude > 0)) fail("lo.A", "must be positive");

  if (doc.contains("two_j")) {
    config.two_j = doc.at("two_j").get<int>();
    if (*config.two_j < 0) fail("two_j", "must be non-negative");
  }
  if (doc.contains("window")) {
    const json& w = doc.at("window");
    config.window.c_sigmas = w.value("c_sigmas", 10.0);
    if (!(config.window.c_sigmas > 0)) fail("window.c_sigmas", "must be > 0");
    if (w.contains("two_m_cap")) {
      const int cap = w.at("two_m_cap").get<int>();
      if (cap < 0) fail("window.two_m_cap", "must be non-negative");
      config.window.two_m_cap = cap;
    }
  }

  const json& engines = require(doc, "engines", "");
  if (!engines.is_array() || engines.empty()) {
    fail("engines", "expected a non-empty array");
  }
  for (const auto& entry : engines) {
    const std::string name = entry.get<std::string>();
    if (name == "exact") {
      config.engines.push_back(EngineKind::exact);
    } else if (name == "asymptotic") {
      config.engines.push_back(EngineKind::asymptotic);
    } else if (name == "series") {
      config.engines.push_back(EngineKind::series);
    } else {
      fail("engines", "unknown engine '" + name + "'");
    }
  }

  const bool wants_series =
      std::find(config.engines.begin(), config.engines.end(),
                EngineKind::series) != config.engines.end();
  if (doc.contains("series_orders")) {
    if (!wants_series) {
      fail("series_orders", "present but the series engine is not selected");
    }
    for (const auto& entry : doc.at("series_orders")) {
      config.series_orders.push_back(entry.get<int>());
    }
  }
  if (wants_series) {
    if (config.series_orders.empty()) {
      fail("series_orders", "required when the series engine is selected");
    }
    std::sort(config.series_orders.begin(), config.series_orders.end());
    config.series_orders.erase(std::unique(config.series_orders.begin(),
                                           config.series_orders.end()),
                               config.series_orders.end());
    for (int order : config.series_orders) {
      if (order < 0 || order % 2 != 0 || order > kSeriesOrderCap) {
        fail("series_orders", "orders must be even, in [0, " +
                                  std::to_string(kSeriesOrderCap) + "]");
      }
    }
  }

  if (doc.contains("x_convention")) {
    const std::string conv = doc.at("x_convention").get<std::string>();
    if (conv == "m_over_sqrt_j") {
      config.x_convention = XConvention::m_over_sqrt_j;
    } else if (conv == "sqrt2_m_over_A") {
      config.x_convention = XConvention::sqrt2_m_over_A;
    } else {
      fail("x_convention", "unknown convention '" + conv + "'");
    }
  }

  if (doc.contains("output")) {
    const json& out = doc.at("output");
    config.output.path = out.value("path", std::string());
    config.output.format = out.value("format", std::string("csv"));
    if (config.output.format != "csv" && config.output.format != "json") {
      fail("output.format", "must be 'csv' or 'json'");
    }
  }
  return config;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("scenario config: cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

ScenarioConfig figure2_preset(char which) {
  ScenarioConfig config;
  config.lo_amplitude = 20.0;
  config.lo_phase = 0.0;
  config.engines = {EngineKind::exact, EngineKind::series};
  config.series_orders = {0, 2, 4};
  // |x| <= 8 band: |two_m| <= 8 sqrt(2) A
  config.window.two_m_cap =
      static_cast<int>(std::floor(8.0 * std::sqrt(2.0) * 20.0));
  switch (which) {
    case 'a':
      config.state.type = StateSpec::Type::coherent;
      config.state.beta = {2.0, 0.0};
      config.two_j = 380;
      config.output.path = "figure2_a.csv";
      break;
    case 'b':
      config.state.type = StateSpec::Type::squeezed_vacuum;
      config.state.squeeze_r = 1.5;
      config.two_j = 439;
      config.output.path = "figure2_b.csv";
      break;
    case 'c':
      config.state.type = StateSpec::Type::number;
      config.state.number_n = 6;
      config.two_j = 367;
      config.output.path = "figure2_c.csv";
      break;
    default:
      throw std::invalid_argument(
          "figure2_preset: variant must be 'a', 'b' or 'c'");
  }
  return config;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::vector<CountOutcome> scenario_outcomes(const ScenarioConfig& config) {
  if (config.two_j) {
    const int two_j = *config.two_j;
    int cap = two_j;
    if (config.window.two_m_cap) {
      cap = std::min(cap, *config.window.two_m_cap);
      if (((cap - two_j) % 2) != 0) --cap;
      cap = std::max(cap, two_j % 2 == 0 ? 0 : 1);
    }
    std::vector<CountOutcome> outcomes;
    for (int two_m = -cap; two_m <= cap; two_m += 2) {
      outcomes.push_back(CountOutcome{two_j, two_m});
    }
    return outcomes;
  }
  return detail::window_outcomes(config.lo_amplitude, config.window);
}

}  // namespace

ResultTable run_scenario(const ScenarioConfig& config) {
  const LocalOscillator lo = config.lo();
  const auto outcomes = scenario_outcomes(config);

  const bool pure = config.state.pure();
  FockVector<double> psi;
  FockDensity<double> rho;
  if (pure) {
    psi = config.state.build_pure();
  } else {
    rho = config.state.build_density();
  }

  ResultTable table;
  table.rows.resize(outcomes.size());
  for (size_t i = 0; i < outcomes.size(); ++i) {
    table.rows[i].two_j = outcomes[i].two_j;
    table.rows[i].two_m = outcomes[i].two_m;
    table.rows[i].x =
        outcomes[i].two_m / (std::sqrt(2.0) * config.lo_amplitude);
  }

  for (EngineKind engine : config.engines) {
    switch (engine) {
      case EngineKind::exact: {
        table.has_exact = true;
        const auto dist = pure ? distribution_over(psi, lo, outcomes)
                               : distribution_over(rho, lo, outcomes);
        for (size_t i = 0; i < outcomes.size(); ++i) {
          table.rows[i].p_exact = dist.probs[static_cast<Eigen::Index>(i)];
          const double lp = dist.log_probs[static_cast<Eigen::Index>(i)];
          if (!std::isinf(lp)) table.rows[i].log_p_exact = lp;
        }
        break;
      }
      case EngineKind::asymptotic: {
        table.has_asymptotic = true;
        for (size_t i = 0; i < outcomes.size(); ++i) {
          table.rows[i].p_asymptotic =
              pure ? asymptotic_probability(psi, lo, outcomes[i],
                                            config.x_convention)
                   : asymptotic_probability(rho, lo, outcomes[i],
                                            config.x_convention);
        }
        break;
      }
      case EngineKind::series: {
        table.orders = config.series_orders;
        for (size_t i = 0; i < outcomes.size(); ++i) {
          for (int order : config.series_orders) {
            const double value =
                pure ? series_probability(psi, lo, outcomes[i],
                                          SeriesOrder{order})
                     : series_probability(rho, lo, outcomes[i],
                                          SeriesOrder{order});
            table.rows[i].p_series[order] = value;
          }
        }
        break;
      }
    }
  }

  table.columns = {"two_j", "two_m", "x"};
  if (table.has_exact) table.columns.push_back("p_exact");
  if (table.has_asymptotic) table.columns.push_back("p_asymptotic");
  for (int order : table.orders) {
    table.columns.push_back("p_series_" + std::to_string(order));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Output

namespace {

/// 17 significant digits; magnitudes below 1e-300 collapse to plain 0 so CSV
/// consumers always see finite floats.
std::string format_probability(double value) {
  if (std::abs(value) < 1e-300) return "0";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string format_plain(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

std::string to_csv(const ResultTable& table) {
  std::string out;
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const ResultRow& row : table.rows) {
    out += std::to_string(row.two_j);
    out += ',';
    out += std::to_string(row.two_m);
    out += ',';
    out += format_plain(row.x);
    if (table.has_exact) {
      out += ',';
      out += format_probability(row.p_exact.value());
    }
    if (table.has_asymptotic) {
      out += ',';
      out += format_probability(row.p_asymptotic.value());
    }
    for (int order : table.orders) {
      out += ',';
      out += format_probability(row.p_series.at(order));
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const ResultTable& table) {
  ordered_json doc;
  doc["columns"] = table.columns;
  ordered_json rows = ordered_json::array();
  for (const ResultRow& row : table.rows) {
    ordered_json r;
    r["two_j"] = row.two_j;
    r["two_m"] = row.two_m;
    r["x"] = row.x;
    if (table.has_exact) {
      const double p = row.p_exact.value();
      r["p_exact"] = std::abs(p) < 1e-300 ? 0.0 : p;
      if (row.log_p_exact) {
        r["log_p_exact"] = *row.log_p_exact;
      } else {
        r["log_p_exact"] = nullptr;
      }
    }
    if (table.has_asymptotic) {
      const double p = row.p_asymptotic.value();
      r["p_asymptotic"] = std::abs(p) < 1e-300 ? 0.0 : p;
    }
    for (int order : table.orders) {
      const double p = row.p_series.at(order);
      r["p_series_" + std::to_string(order)] = std::abs(p) < 1e-300 ? 0.0 : p;
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string write_result(const ResultTable& table, const OutputSpec& output) {
  const std::string text =
      output.format == "json" ? to_json(table) : to_csv(table);
  if (output.path.empty()) {
    std::cout << text;
    return "-";
  }
  std::ofstream out(output.path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + output.path + "'");
  }
  out << text;
  return output.path;
}

}  // namespace homodyne::scenario
