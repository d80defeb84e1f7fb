// Copyright 2026 The BSMamba Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace bsm::checks {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Check {
  std::string name;
  std::function<Outcome()> run;
};

struct Result {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Every acceptance criterion, in a fixed order.
const std::vector<Check>& all_checks();

/// Runs the checks whose name contains `filter` (all when empty), printing one
/// "PASS"/"FAIL" line per check to `out`. Exceptions count as failures.
std::vector<Result> run_checks(std::ostream& out, const std::string& filter = {});

bool all_passed(const std::vector<Result>& results);

}  // namespace bsm::checks
