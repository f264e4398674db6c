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


#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uqnn/experiment.hpp"

using namespace uqnn;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const fs::path p = fs::temp_directory_path() / ("uqnn_experiment_" + name);
    fs::remove_all(p);
    return p;
}

json small_config(const fs::path &out) {
    return {{"name", "unit"},
            {"dataset", "pneumonia"},
            {"pca_k", 4},
            {"method", "qnn"},
            {"layers", {4, 4, 2}},
            {"train_mode", "exact"},
            {"infer_mode", "sampled:100"},
            {"hyperparameters", {{"epochs", 2}, {"batch_size", 10}, {"learning_rate", 0.3}}},
            {"repetitions", 2},
            {"seed", 3},
            {"output_dir", out.string()},
            {"data", {{"source", "synthetic"}, {"synthetic_train", 80}, {"synthetic_test", 40}}}};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_error_field(const json &j) {
    try {
        ExperimentConfig::from_json(j);
    } catch (const ConfigError &e) {
        return e.field();
    }
    return "<accepted>";
}

TEST(ParseMode, Forms) {
    EXPECT_TRUE(parse_mode("exact", "m").is_exact());
    EXPECT_EQ(parse_mode("sampled", "m").n_shots, kDefaultShots);
    EXPECT_EQ(parse_mode("sampled:25", "m").n_shots, 25u);
    EXPECT_EQ(parse_mode(json{{"kind", "sampled"}, {"n_shots", 7}}, "m").n_shots, 7u);
    EXPECT_EQ(mode_to_json(parse_mode("sampled:25", "m")), "sampled:25");
    EXPECT_THROW(parse_mode("sampled:0", "m"), ConfigError);
    EXPECT_THROW(parse_mode("approximate", "m"), ConfigError);
}

TEST(Config, RejectsBadFieldsWithPath) {
    const json ok = small_config("x");
    EXPECT_EQ(config_error_field(ok), "<accepted>");

    json j = ok;
    j["dataset"] = "chest";
    EXPECT_EQ(config_error_field(j), "dataset");
    j = ok;
    j["colour"] = 1;
    EXPECT_EQ(config_error_field(j), "colour");
    j = ok;
    j["hyperparameters"]["momentum"] = 0.9;
    EXPECT_EQ(config_error_field(j), "hyperparameters.momentum");
    j = ok;
    j["layers"] = {4, 4, 3};
    EXPECT_EQ(config_error_field(j), "layers");
    j = ok;
    j["layers"] = {8, 4, 2};
    EXPECT_EQ(config_error_field(j), "layers");
    j = ok;
    j["hyperparameters"]["learning_rate"] = -1.0;
    EXPECT_EQ(config_error_field(j), "hyperparameters.learning_rate");
    j = ok;
    j["method"] = "orthonn";
    j["layers"] = {4, 8, 2};
    EXPECT_EQ(config_error_field(j), "layers");
    j = ok;
    j["method"] = "orthonn";
    j["layers"] = {4, 2};
    j["train_mode"] = "sampled:100";
    EXPECT_EQ(config_error_field(j), "train_mode");
    j = ok;
    j["method"] = "orthonn";
    j["trainer"] = "svb";
    j["layers"] = {4, 2};
    EXPECT_EQ(config_error_field(j), "infer_mode");
    j = ok;
    j["data"]["train_fraction"] = 0.0;
    EXPECT_EQ(config_error_field(j), "data.train_fraction");
}

TEST(Config, JsonRoundTrip) {
    const ExperimentConfig c = ExperimentConfig::from_json(small_config("x"));
    EXPECT_EQ(c.trainer, "backprop");
    EXPECT_EQ(c.task, "pneumonia");
    const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
    EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(RunExperiment, InvalidConfigCreatesNothing) {
    const fs::path out = scratch("invalid");
    ExperimentConfig c = ExperimentConfig::from_json(small_config(out));
    c.dataset = "chest";
    EXPECT_THROW(run_experiment(c), ConfigError);
    EXPECT_FALSE(fs::exists(out));
}

TEST(RunExperiment, MissingArchiveIsDataUnavailable) {
    const fs::path out = scratch("missing");
    json j = small_config(out);
    j["data"] = {{"source", "medmnist"}, {"path", (out / "nothing.npz").string()}};
    EXPECT_THROW(run_experiment(ExperimentConfig::from_json(j)), DataUnavailable);
}

TEST(RunExperiment, ArtifactsAndDeterministicMetrics) {
    const fs::path a = scratch("det");
    const ExperimentConfig c = ExperimentConfig::from_json(small_config(a));
    run_experiment(c);
    const std::string first = slurp(a / "metrics.json");
    run_experiment(c);
    EXPECT_EQ(slurp(a / "metrics.json"), first);
    for (const char *f : {"config.json", "timing.json", "history_rep0.csv", "history_rep1.csv", "model_rep0.json",
                          "model_rep1.json"}) {
        EXPECT_TRUE(fs::exists(a / f)) << f;
    }
    const json m = json::parse(first);
    EXPECT_EQ(m.at("repetitions").size(), 2u);
    EXPECT_EQ(m.at("data").at("n_train").get<size_t>(), 80u);
    const std::string history = slurp(a / "history_rep0.csv");
    EXPECT_EQ(std::count(history.begin(), history.end(), '\n'), 3);
    fs::remove_all(a);
}

TEST(RunExperiment, OrthonnTrainers) {
    for (const char *trainer : {"qpc", "svb"}) {
        const fs::path out = scratch(trainer);
        json j = small_config(out);
        j["method"] = "orthonn";
        j["trainer"] = trainer;
        j["layers"] = {4, 2};
        j["infer_mode"] = "exact";
        j["repetitions"] = 1;
        const ExperimentResult r = run_experiment(ExperimentConfig::from_json(j));
        const double acc = r.metrics.at("summary").at("test_acc").at("mean").get<double>();
        EXPECT_GE(acc, 0.0);
        EXPECT_LE(acc, 1.0);
        fs::remove_all(out);
    }
}

TEST(DryRun, CountsWithoutFiles) {
    const fs::path out = scratch("dry");
    const json d = dry_run(ExperimentConfig::from_json(small_config(out)));
    EXPECT_FALSE(fs::exists(out));
    const json &e = d.at("estimate");
    EXPECT_EQ(e.at("circuits_per_sample_forward").get<uint64_t>(), 6u);
    EXPECT_EQ(e.at("training_circuits").get<uint64_t>(), 0u);
    EXPECT_EQ(e.at("inference_circuits").get<uint64_t>(), 2u * 120u * 6u);
    EXPECT_EQ(e.at("shots_per_circuit").get<uint64_t>(), 100u);
}

json small_suite(const fs::path &out) {
    json base = small_config(out);
    for (const char *k : {"name", "dataset", "repetitions", "seed", "output_dir", "layers", "pca_k", "method",
                          "infer_mode"}) {
        base.erase(k);
    }
    return {{"datasets", {"pneumonia", "retina"}},
            {"repetitions", 2},
            {"seed", 11},
            {"output_dir", out.string()},
            {"base", base},
            {"rows",
             {{{"label", "qNN [4,4,2]"}, {"method", "qnn"}, {"layers", {4, 4, 2}}},
              {{"label", "qOrthNN [4,2]"}, {"method", "orthonn"}, {"layers", {4, 2}}}}}};
}

TEST(Table1, SuiteErrorsNameTheRow) {
    json s = small_suite("x");
    s["rows"][1]["layers"] = {4, 3};
    try {
        Table1Suite::from_json(s);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError &e) {
        EXPECT_EQ(e.field(), "rows[1].layers");
    }
}

TEST(Table1, ShippedSuiteHasEightRows) {
    std::ifstream in(std::string(UQNN_SOURCE_DIR) + "/configs/table1.json");
    const Table1Suite s = Table1Suite::from_json(json::parse(in));
    EXPECT_EQ(s.rows.size(), 8u);
    EXPECT_EQ(s.datasets, (std::vector<std::string>{"pneumonia", "retina"}));
    EXPECT_EQ(s.repetitions, 10u);
    for (size_t r = 0; r < s.rows.size(); ++r) {
        const ExperimentConfig c = s.cell_config(r, "retina");
        EXPECT_EQ(c.task, "retina_0_vs_rest");
        EXPECT_EQ(c.pca_k, c.layers.front());
    }
}

TEST(Table1, ResumesFromCells) {
    const fs::path out = scratch("table1");
    const Table1Suite s = Table1Suite::from_json(small_suite(out));
    const Table1Result first = table1_runner(s, 2);
    EXPECT_EQ(first.computed, 8u);
    EXPECT_EQ(first.reused, 0u);
    const std::string csv = slurp(out / "table1.csv");
    fs::remove(out / "cells" / "row1_retina_rep1.json");
    const Table1Result second = table1_runner(s, 1);
    EXPECT_EQ(second.computed, 1u);
    EXPECT_EQ(second.reused, 7u);
    EXPECT_EQ(slurp(out / "table1.csv"), csv);
    ASSERT_EQ(second.cells.size(), 2u);
    ASSERT_EQ(second.cells[0].size(), 2u);
    fs::remove_all(out);
}

}  // namespace
