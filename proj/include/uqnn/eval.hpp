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
 * Classification metrics and report tables.
 */

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uqnn/orthonn.hpp"

namespace uqnn {

/// Mann-Whitney AUC of `scores` as evidence for class 1; ties count 1/2.
/// Throws if either class is absent.
double auc(std::span<const double> scores, std::span<const int> labels);

/// confusion[true][predicted].
using Confusion = std::array<std::array<uint64_t, 2>, 2>;

struct AccConfusion {
    double acc = 0.0;
    Confusion confusion{};
};

AccConfusion acc_and_confusion(std::span<const int> predicted, std::span<const int> labels);

struct MetricsReport {
    std::string split;
    size_t n = 0;
    double auc = 0.0;
    double acc = 0.0;
    Confusion confusion{};
};

/// Builds a report from two-node outputs: prediction argmax (ties to 0),
/// AUC score out[1] - out[0].
MetricsReport make_report(const std::string &split, const std::vector<std::vector<double>> &outputs,
                          std::span<const int> labels);

nlohmann::json report_to_json(const MetricsReport &r);
MetricsReport report_from_json(const nlohmann::json &j);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation; 0 for fewer than two values
};

MeanStd mean_std(std::span<const double> v);

struct CrossoverRow {
    uint64_t n = 0;
    uint64_t quantum = 0;
    uint64_t classical = 0;
    double quantum_continuous = 0.0;
};

struct CrossoverReport {
    uint64_t shots = 0;
    uint64_t crossover = 0;               ///< smallest n with quantum < classical
    double crossover_continuous = 0.0;    ///< same with unrounded log2
    std::vector<CrossoverRow> rows;
};

/// Step counts at powers of two up to 2^20 plus n = 100 x 100 and the
/// crossover itself.
CrossoverReport crossover_report(uint64_t shots = kDefaultShots);

void write_crossover_csv(std::ostream &os, const CrossoverReport &r);
nlohmann::json crossover_to_json(const CrossoverReport &r);

void write_scaling_csv(std::ostream &os, const std::vector<ScalingRow> &rows);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace uqnn
