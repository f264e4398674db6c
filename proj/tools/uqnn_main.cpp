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


// uqnn: dataset conversion, experiment runs, benchmark suites and self checks.
// Errors go to stdout as one JSON object; progress goes to stderr.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uqnn/dataio.hpp"
#include "uqnn/eval.hpp"
#include "uqnn/experiment.hpp"
#include "uqnn/npz.hpp"
#include "uqnn/orthonn.hpp"
#include "uqnn/report_io.hpp"
#include "uqnn/selftest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitChecks = 4;

int report_error(const std::string &type, const std::string &message, const std::string &field = "") {
    json err = {{"error", {{"type", type}, {"message", message}}}};
    if (!field.empty()) {
        err["error"]["field"] = field;
    }
    std::cout << err.dump() << std::endl;
    return type == "config" ? kExitConfig : type == "data_unavailable" ? kExitData : kExitFailure;
}

json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw uqnn::ConfigError("config", "cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw uqnn::ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

/// "a..b" (every `step`), "a..b:step", or "a,b,c".
std::vector<size_t> parse_n_list(const std::string &spec, size_t default_step) {
    std::vector<size_t> out;
    const auto dots = spec.find("..");
    if (dots == std::string::npos) {
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            out.push_back(std::stoul(item));
        }
    } else {
        const size_t lo = std::stoul(spec.substr(0, dots));
        std::string rest = spec.substr(dots + 2);
        size_t step = default_step;
        if (const auto colon = rest.find(':'); colon != std::string::npos) {
            step = std::stoul(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        const size_t hi = std::stoul(rest);
        if (step == 0 || hi < lo) {
            throw uqnn::ConfigError("--n", "expected lo..hi[:step] with lo <= hi and step > 0");
        }
        for (size_t n = lo; n <= hi; n += step) {
            out.push_back(n);
        }
    }
    for (size_t n : out) {
        if (n < 2) {
            throw uqnn::ConfigError("--n", "sizes must be at least 2");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Unary-encoding quantum-assisted neural networks: simulation, training and benchmarks"};
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "Run one experiment from a JSON config");
    std::string config_path;
    bool dry = false;
    std::string out_override, data_override;
    std::optional<uint64_t> seed_override;
    std::optional<size_t> reps_override;
    run->add_option("--config", config_path, "Experiment config file")->required();
    run->add_flag("--dry-run", dry, "Print the resolved config and circuit-count estimates");
    run->add_option("--output-dir", out_override, "Overrides output_dir");
    run->add_option("--seed", seed_override, "Overrides seed");
    run->add_option("--repetitions", reps_override, "Overrides repetitions");
    run->add_option("--data", data_override, "Overrides data.path");

    auto *table1 = app.add_subcommand("table1", "Run a results-table suite with resumable cells");
    std::string suite_path;
    size_t jobs = 1;
    table1->add_option("--suite", suite_path, "Suite file")->required();
    table1->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto *bench = app.add_subcommand("bench-scaling", "Time [n, n, 2] QPC training and count rotations");
    std::string n_spec = "2..392";
    size_t n_step = 30, epochs = 1, samples = 64;
    uint64_t bench_seed = 0;
    std::string bench_out = "scaling_out";
    bench->add_option("--n", n_spec, "lo..hi[:step] or a comma list");
    bench->add_option("--step", n_step, "Step for lo..hi ranges");
    bench->add_option("--epochs", epochs)->check(CLI::PositiveNumber);
    bench->add_option("--samples", samples)->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_seed);
    bench->add_option("--out", bench_out, "Output directory");

    auto *cross = app.add_subcommand("crossover", "Quantum vs classical step counts and the crossover dimension");
    uint64_t shots = uqnn::kDefaultShots;
    std::string cross_out;
    cross->add_option("--shots", shots)->check(CLI::PositiveNumber);
    cross->add_option("--out", cross_out, "Also write crossover.csv, crossover.json and crossover.svg here");

    auto *convert = app.add_subcommand("convert", "CSV directory to npz, or npz to CSV directory");
    std::string conv_in, conv_out;
    convert->add_option("--in", conv_in)->required();
    convert->add_option("--out", conv_out)->required();

    auto *selftest = app.add_subcommand("selftest", "Run every property check");
    std::vector<std::string> only;
    uint64_t st_seed = uqnn::SelftestOptions{}.seed;
    bool list = false;
    selftest->add_option("--check", only, "Run only the named checks");
    selftest->add_option("--seed", st_seed);
    selftest->add_flag("--list", list, "List check names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        return report_error("usage", e.what());
    }

    try {
        if (run->parsed()) {
            json j = read_json_file(config_path);
            if (!j.is_object()) {
                throw uqnn::ConfigError("<root>", "expected an object");
            }
            if (!out_override.empty()) j["output_dir"] = out_override;
            if (seed_override) j["seed"] = *seed_override;
            if (reps_override) j["repetitions"] = *reps_override;
            if (!data_override.empty()) j["data"]["path"] = data_override;
            const uqnn::ExperimentConfig config = uqnn::ExperimentConfig::from_json(j);
            if (dry) {
                std::cout << uqnn::dry_run(config).dump(2) << std::endl;
                return 0;
            }
            const uqnn::ExperimentResult r = uqnn::run_experiment(config);
            std::cout << json({{"output_dir", config.output_dir}, {"summary", r.metrics.at("summary")}}).dump(2)
                      << std::endl;
            return 0;
        }
        if (table1->parsed()) {
            const uqnn::Table1Suite suite = uqnn::Table1Suite::from_json(read_json_file(suite_path));
            const uqnn::Table1Result r = uqnn::table1_runner(suite, jobs);
            std::cout << json({{"output_dir", suite.output_dir}, {"reused", r.reused}, {"computed", r.computed}}).dump(2)
                      << std::endl;
            return 0;
        }
        if (bench->parsed()) {
            const std::vector<size_t> ns = parse_n_list(n_spec, n_step);
            fs::create_directories(bench_out);
            const auto rows = uqnn::scaling_benchmark(ns, epochs, samples, bench_seed);
            std::ostringstream csv;
            uqnn::write_scaling_csv(csv, rows);
            write_text(fs::path(bench_out) / "scaling.csv", csv.str());
            uqnn::PlotSeries time{"wall time", {}, {}};
            for (const auto &row : rows) {
                time.x.push_back(static_cast<double>(row.n));
                time.y.push_back(row.wall_seconds);
            }
            uqnn::write_line_plot(fs::path(bench_out) / "scaling.svg",
                                  {"QPC training time for [n, n, 2]", "n", "seconds", true, true}, {time});
            std::cout << csv.str();
            return 0;
        }
        if (cross->parsed()) {
            const uqnn::CrossoverReport r = uqnn::crossover_report(shots);
            std::ostringstream csv;
            uqnn::write_crossover_csv(csv, r);
            if (!cross_out.empty()) {
                fs::create_directories(cross_out);
                write_text(fs::path(cross_out) / "crossover.csv", csv.str());
                write_text(fs::path(cross_out) / "crossover.json", uqnn::crossover_to_json(r).dump(2) + "\n");
                uqnn::PlotSeries q{"quantum", {}, {}}, c{"classical", {}, {}};
                for (const auto &row : r.rows) {
                    q.x.push_back(static_cast<double>(row.n));
                    q.y.push_back(static_cast<double>(row.quantum));
                    c.x.push_back(static_cast<double>(row.n));
                    c.y.push_back(static_cast<double>(row.classical));
                }
                uqnn::write_line_plot(fs::path(cross_out) / "crossover.svg",
                                      {"Steps per inner product", "n", "steps", true, true}, {q, c});
            }
            std::cout << uqnn::crossover_to_json(r).dump(2) << std::endl;
            return 0;
        }
        if (convert->parsed()) {
            uqnn::convert_csv(conv_in, conv_out);
            std::cout << json({{"in", conv_in}, {"out", conv_out}}).dump() << std::endl;
            return 0;
        }
        if (selftest->parsed()) {
            if (list) {
                for (const auto &name : uqnn::selftest_names()) {
                    std::cout << name << '\n';
                }
                return 0;
            }
            uqnn::SelftestOptions opt;
            opt.seed = st_seed;
            std::vector<uqnn::CheckResult> results;
            if (only.empty()) {
                results = uqnn::run_selftest(opt, &std::cout);
            } else {
                for (const auto &name : only) {
                    results.push_back(uqnn::run_check(name, opt));
                    const auto &r = results.back();
                    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << '\n';
                }
            }
            size_t failed = 0;
            for (const auto &r : results) {
                failed += r.passed ? 0 : 1;
            }
            std::cout << results.size() - failed << "/" << results.size() << " checks passed" << std::endl;
            return failed == 0 ? 0 : kExitChecks;
        }
    } catch (const uqnn::ConfigError &e) {
        return report_error("config", e.message(), e.field());
    } catch (const uqnn::DataUnavailable &e) {
        return report_error("data_unavailable", e.what());
    } catch (const uqnn::FormatError &e) {
        return report_error("format", e.what());
    } catch (const std::exception &e) {
        return report_error("runtime", e.what());
    }
    return kExitFailure;
}
