// Copyright 2026 The uqnn Authors
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


/**
 * @file
 * Property checks over every module, shared by `uqnn selftest` and the
 * acceptance suite. Each check is self-contained and deterministic given
 * its seed; oracles are computed independently of the code under test
 * (dense state vectors, closed-form formulas, finite differences).
 */

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace uqnn {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct SelftestOptions {
    /// Random vectors per (topology, dimension) in the loader round trip.
    size_t loader_trials = 1000;
    /// Repetitions per shot budget in the concentration check.
    size_t concentration_trials = 400;
    uint64_t seed = 2026;
};

/// Names in run order.
std::vector<std::string> selftest_names();

/// Runs one check by name. Unknown names throw std::invalid_argument.
/// Exceptions raised inside a check are reported as failures.
CheckResult run_check(const std::string &name, const SelftestOptions &options = {});

/// Runs every check; when `log` is given, one line per check is written as it finishes.
std::vector<CheckResult> run_selftest(const SelftestOptions &options = {}, std::ostream *log = nullptr);

}  // namespace uqnn
