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

#ifndef HOMODYNE_ACCEPTANCE_HPP_
#define HOMODYNE_ACCEPTANCE_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace homodyne::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;   // measured values vs thresholds
  double seconds = 0.0;
};

struct Options {
  std::string config_dir;
  std::vector<int> only;             // empty = all criteria
  bool corrupt_wigner_seed = false;  // negative-control fault injection
};

/// Runs the requested criteria against the fixture configs in
/// options.config_dir.  Throws std::invalid_argument if the directory or a
/// required fixture file is missing.
std::vector<CriterionResult> run_acceptance(const Options& options);

/// One line per criterion plus a summary; returns true if all passed.
bool report(const std::vector<CriterionResult>& results, std::ostream& out);

}  // namespace homodyne::acceptance

#endif  // HOMODYNE_ACCEPTANCE_HPP_
