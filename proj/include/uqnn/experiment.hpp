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
 * Experiment configuration, single runs and the results-table suite runner.
 * Configuration is JSON; docs/config_schema.json documents every field.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "uqnn/dataio.hpp"
#include "uqnn/estimators.hpp"
#include "uqnn/eval.hpp"

namespace uqnn {

/// Invalid configuration; `field` names the offending key path.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(const std::string &field, const std::string &what)
        : std::invalid_argument(field + ": " + what), field_(field), message_(what) {}
    const std::string &field() const { return field_; }
    const std::string &message() const { return message_; }

  private:
    std::string field_;
    std::string message_;
};

/// Dataset files not found.
class DataUnavailable : public std::runtime_error {
  public:
    explicit DataUnavailable(const std::string &what) : std::runtime_error(what) {}
};

/// "exact", "sampled", "sampled:<shots>" or {"kind": ..., "n_shots": ...}.
EstimatorMode parse_mode(const nlohmann::json &j, const std::string &field);
nlohmann::json mode_to_json(const EstimatorMode &m);

struct DataConfig {
    std::string source = "medmnist";  ///< "medmnist" or "synthetic"
    std::string path;                 ///< archive or CSV directory; empty uses MEDMNIST_DIR
    size_t subsample_per_class = 0;   ///< 0 keeps the whole training split
    double train_fraction = 1.0;
    size_t synthetic_train = 600;
    size_t synthetic_test = 200;
};

struct Hyperparameters {
    size_t epochs = 30;
    size_t batch_size = 10;
    double learning_rate = 0.05;
    double svb_epsilon = 0.01;
    size_t svb_clip_every = 1;
};

struct ExperimentConfig {
    std::string name;
    std::string dataset;
    std::string task;       ///< derived from dataset when omitted
    size_t pca_k = 0;       ///< 0: raw 784 pixels
    bool normalize = true;
    std::string method;     ///< "qnn" or "orthonn"
    std::string trainer;    ///< orthonn: "qpc" or "svb"; qnn: "backprop"
    std::vector<size_t> layers;
    EstimatorMode train_mode;
    EstimatorMode infer_mode;
    Hyperparameters hyper;
    size_t repetitions = 1;
    uint64_t seed = 0;
    std::string output_dir;
    DataConfig data;

    /// Parses and validates; unknown keys are rejected.
    static ExperimentConfig from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;
    /// Throws ConfigError.
    void validate() const;
};

/// Prepared train/test features for a config (dataset, k, normalize,
/// subsampling). Throws DataUnavailable when the archive cannot be found.
PreparedSplits load_data(const ExperimentConfig &config);

struct RepetitionResult {
    uint64_t seed = 0;
    MetricsReport train;
    MetricsReport test;
    History history;
    nlohmann::json model;
    double train_seconds = 0.0;
};

RepetitionResult run_repetition(const ExperimentConfig &config, const PreparedSplits &data, uint64_t seed);

struct ExperimentResult {
    nlohmann::json metrics;  ///< deterministic given config and data
    nlohmann::json timing;
};

/// Runs every repetition and writes metrics.json, timing.json,
/// config.json, history_rep<k>.csv and model_rep<k>.json to output_dir.
ExperimentResult run_experiment(const ExperimentConfig &config);

/// Resolved config plus circuit-count estimates; touches no files.
nlohmann::json dry_run(const ExperimentConfig &config);

struct Table1Row {
    std::string label;
    nlohmann::json overrides;  ///< ExperimentConfig fields for this row
};

struct Table1Suite {
    std::vector<std::string> datasets{"pneumonia", "retina"};
    size_t repetitions = 10;
    uint64_t seed = 0;
    std::string output_dir;
    nlohmann::json base;  ///< fields shared by every row
    std::vector<Table1Row> rows;

    static Table1Suite from_json(const nlohmann::json &j);
    /// Full config of one (row, dataset) cell, validated.
    ExperimentConfig cell_config(size_t row, const std::string &dataset) const;
};

struct Table1Cell {
    MeanStd auc_train, auc_test, acc_train, acc_test;
};

struct Table1Result {
    std::vector<std::string> labels;
    std::vector<std::string> datasets;
    std::vector<std::vector<Table1Cell>> cells;  ///< [row][dataset]
    size_t reused = 0;                            ///< repetitions loaded from existing artifacts
    size_t computed = 0;
};

/// Runs every (row, dataset, repetition) not already present under
/// output_dir/cells, using `jobs` worker threads, and writes table1.csv and
/// table1.json.
Table1Result table1_runner(const Table1Suite &suite, size_t jobs = 1);

}  // namespace uqnn
