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


#include "uqnn/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "uqnn/orthonn.hpp"
#include "uqnn/qnn.hpp"
#include "uqnn/rng.hpp"

namespace uqnn {

namespace fs = std::filesystem;
using nlohmann::json;

EstimatorMode parse_mode(const json &j, const std::string &field) {
    if (j.is_object()) {
        const std::string kind = j.value("kind", std::string());
        if (kind == "exact") {
            return EstimatorMode::exact();
        }
        if (kind == "sampled") {
            const auto shots = j.value("n_shots", kDefaultShots);
            if (shots < 1) {
                throw ConfigError(field + ".n_shots", "must be >= 1");
            }
            return EstimatorMode::sampled(shots, 0);
        }
        throw ConfigError(field + ".kind", "expected 'exact' or 'sampled'");
    }
    if (!j.is_string()) {
        throw ConfigError(field, "expected a string or an object");
    }
    const std::string s = j.get<std::string>();
    if (s == "exact") {
        return EstimatorMode::exact();
    }
    if (s == "sampled") {
        return EstimatorMode::sampled(kDefaultShots, 0);
    }
    if (s.rfind("sampled:", 0) == 0) {
        const std::string digits = s.substr(8);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos || std::stoull(digits) < 1) {
            throw ConfigError(field, "shot count in '" + s + "' must be a positive integer");
        }
        return EstimatorMode::sampled(std::stoull(digits), 0);
    }
    throw ConfigError(field, "expected 'exact', 'sampled' or 'sampled:<shots>', got '" + s + "'");
}

json mode_to_json(const EstimatorMode &m) {
    return m.is_exact() ? json("exact") : json("sampled:" + std::to_string(m.n_shots));
}

namespace {

/// Reads known keys from an object and rejects anything left over.
class Fields {
  public:
    Fields(const json &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    std::string key(const std::string &k) const { return path_.empty() ? k : path_ + "." + k; }

    const json *get(const std::string &k) {
        seen_.insert(k);
        const auto it = j_.find(k);
        return it == j_.end() ? nullptr : &*it;
    }

    template <class T>
    void read(const std::string &k, T &out) {
        if (const json *v = get(k)) {
            try {
                out = v->get<T>();
            } catch (const json::exception &) {
                throw ConfigError(key(k), "has the wrong type");
            }
        }
    }

    void finish() const {
        for (const auto &item : j_.items()) {
            if (seen_.count(item.key()) == 0) {
                throw ConfigError(key(item.key()), "unknown field");
            }
        }
    }

  private:
    const json &j_;
    std::string path_;
    std::set<std::string> seen_;
};

size_t input_dim(const ExperimentConfig &c) { return c.pca_k == 0 ? kImagePixels : c.pca_k; }

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json &j) {
    ExperimentConfig c;
    Fields f(j, "");
    f.read("name", c.name);
    f.read("dataset", c.dataset);
    f.read("task", c.task);
    f.read("pca_k", c.pca_k);
    f.read("normalize", c.normalize);
    f.read("method", c.method);
    f.read("trainer", c.trainer);
    f.read("layers", c.layers);
    if (const json *m = f.get("train_mode")) {
        c.train_mode = parse_mode(*m, "train_mode");
    }
    if (const json *m = f.get("infer_mode")) {
        c.infer_mode = parse_mode(*m, "infer_mode");
    }
    if (const json *h = f.get("hyperparameters")) {
        Fields hf(*h, "hyperparameters");
        hf.read("epochs", c.hyper.epochs);
        hf.read("batch_size", c.hyper.batch_size);
        hf.read("learning_rate", c.hyper.learning_rate);
        hf.read("svb_epsilon", c.hyper.svb_epsilon);
        hf.read("svb_clip_every", c.hyper.svb_clip_every);
        hf.finish();
    }
    f.read("repetitions", c.repetitions);
    f.read("seed", c.seed);
    f.read("output_dir", c.output_dir);
    if (const json *d = f.get("data")) {
        Fields df(*d, "data");
        df.read("source", c.data.source);
        df.read("path", c.data.path);
        df.read("subsample_per_class", c.data.subsample_per_class);
        df.read("train_fraction", c.data.train_fraction);
        df.read("synthetic_train", c.data.synthetic_train);
        df.read("synthetic_test", c.data.synthetic_test);
        df.finish();
    }
    f.finish();
    if (c.trainer.empty()) {
        c.trainer = c.method == "orthonn" ? "qpc" : "backprop";
    }
    if (c.task.empty() && (c.dataset == "pneumonia" || c.dataset == "retina")) {
        c.task = task_name(task_for_dataset(c.dataset));
    }
    c.validate();
    return c;
}

json ExperimentConfig::to_json() const {
    return {{"name", name},
            {"dataset", dataset},
            {"task", task},
            {"pca_k", pca_k},
            {"normalize", normalize},
            {"method", method},
            {"trainer", trainer},
            {"layers", layers},
            {"train_mode", mode_to_json(train_mode)},
            {"infer_mode", mode_to_json(infer_mode)},
            {"hyperparameters",
             {{"epochs", hyper.epochs},
              {"batch_size", hyper.batch_size},
              {"learning_rate", hyper.learning_rate},
              {"svb_epsilon", hyper.svb_epsilon},
              {"svb_clip_every", hyper.svb_clip_every}}},
            {"repetitions", repetitions},
            {"seed", seed},
            {"output_dir", output_dir},
            {"data",
             {{"source", data.source},
              {"path", data.path},
              {"subsample_per_class", data.subsample_per_class},
              {"train_fraction", data.train_fraction},
              {"synthetic_train", data.synthetic_train},
              {"synthetic_test", data.synthetic_test}}}};
}

void ExperimentConfig::validate() const {
    if (dataset != "pneumonia" && dataset != "retina") {
        throw ConfigError("dataset", "unknown dataset '" + dataset + "' (expected pneumonia or retina)");
    }
    if (task != task_name(task_for_dataset(dataset))) {
        throw ConfigError("task", "dataset " + dataset + " implies task " + task_name(task_for_dataset(dataset)));
    }
    if (pca_k > kImagePixels) {
        throw ConfigError("pca_k", "must be at most 784");
    }
    if (method != "qnn" && method != "orthonn") {
        throw ConfigError("method", "unknown method '" + method + "' (expected qnn or orthonn)");
    }
    if (method == "qnn" && trainer != "backprop") {
        throw ConfigError("trainer", "qnn networks are trained by backprop");
    }
    if (method == "orthonn" && trainer != "qpc" && trainer != "svb") {
        throw ConfigError("trainer", "orthonn trainer must be qpc or svb");
    }
    if (layers.size() < 2 || layers.back() != 2) {
        throw ConfigError("layers", "need at least two sizes and exactly two outputs");
    }
    for (size_t n : layers) {
        if (n == 0) {
            throw ConfigError("layers", "sizes must be positive");
        }
    }
    if (layers.front() != input_dim(*this)) {
        throw ConfigError("layers", "first size must equal the feature dimension " + std::to_string(input_dim(*this)));
    }
    if (method == "orthonn") {
        for (size_t l = 0; l + 1 < layers.size(); ++l) {
            if (layers[l + 1] > layers[l]) {
                throw ConfigError("layers", "orthogonal layers cannot widen");
            }
        }
        if (!train_mode.is_exact()) {
            throw ConfigError("train_mode", "orthonn training runs on the angles directly and must be exact");
        }
        if (trainer == "svb" && !infer_mode.is_exact()) {
            throw ConfigError("infer_mode", "svb networks have no circuit form; inference must be exact");
        }
    }
    if (hyper.epochs == 0 || hyper.batch_size == 0 || hyper.svb_clip_every == 0) {
        throw ConfigError("hyperparameters", "epochs, batch_size and svb_clip_every must be positive");
    }
    if (!(hyper.learning_rate >= 0.0) || !std::isfinite(hyper.learning_rate)) {
        throw ConfigError("hyperparameters.learning_rate", "must be finite and >= 0");
    }
    if (!(hyper.svb_epsilon >= 0.0)) {
        throw ConfigError("hyperparameters.svb_epsilon", "must be >= 0");
    }
    if (repetitions == 0) {
        throw ConfigError("repetitions", "must be positive");
    }
    if (data.source != "medmnist" && data.source != "synthetic") {
        throw ConfigError("data.source", "expected medmnist or synthetic");
    }
    if (!(data.train_fraction > 0.0 && data.train_fraction <= 1.0)) {
        throw ConfigError("data.train_fraction", "must be in (0, 1]");
    }
    if (data.synthetic_train == 0 || data.synthetic_test == 0) {
        throw ConfigError("data", "synthetic split sizes must be positive");
    }
}

namespace {

PreparedDataset take_rows(const PreparedDataset &ds, std::vector<size_t> idx) {
    std::sort(idx.begin(), idx.end());
    PreparedDataset out;
    out.features = Matrix(idx.size(), ds.features.cols());
    for (size_t r = 0; r < idx.size(); ++r) {
        auto src = ds.features.row(idx[r]);
        std::copy(src.begin(), src.end(), out.features.row(r).begin());
        out.norms.push_back(ds.norms[idx[r]]);
        out.labels.push_back(ds.labels[idx[r]]);
    }
    return out;
}

}  // namespace

PreparedSplits load_data(const ExperimentConfig &config) {
    const Task task = task_for_dataset(config.dataset);
    MedmnistArchive archive;
    if (config.data.source == "synthetic") {
        archive = synthetic_archive(config.data.synthetic_train, config.data.synthetic_test, task,
                                    derive_seed(config.seed, {0xda7a}));
    } else {
        std::optional<fs::path> path;
        if (!config.data.path.empty()) {
            if (fs::exists(config.data.path)) {
                path = fs::path(config.data.path);
            }
        } else {
            path = locate_dataset(config.dataset);
        }
        if (!path) {
            throw DataUnavailable("dataset '" + config.dataset + "' not found (set data.path or MEDMNIST_DIR to a " +
                                  config.dataset + "mnist.npz archive or CSV directory)");
        }
        archive = read_medmnist(*path);
    }
    PreparedSplits splits = prepare_splits(archive, task, config.pca_k, config.normalize);
    if (config.data.train_fraction < 1.0) {
        std::vector<size_t> idx(splits.train.size());
        std::iota(idx.begin(), idx.end(), size_t{0});
        Rng rng(derive_seed(config.seed, {0xf4ac}));
        rng.shuffle(std::span<size_t>(idx));
        const auto keep = static_cast<size_t>(std::ceil(config.data.train_fraction * static_cast<double>(idx.size())));
        idx.resize(std::max<size_t>(keep, 1));
        const std::string provenance = splits.train.provenance;
        splits.train = take_rows(splits.train, idx);
        const std::string tag = provenance + "|fraction=" + json(config.data.train_fraction).dump();
        splits.train.provenance = hex64(fnv1a(tag.data(), tag.size()));
    }
    if (config.data.subsample_per_class > 0) {
        splits.train = subsample_balanced(splits.train, config.data.subsample_per_class, config.seed);
    }
    return splits;
}

RepetitionResult run_repetition(const ExperimentConfig &config, const PreparedSplits &data, uint64_t seed) {
    config.validate();
    RepetitionResult out;
    out.seed = seed;
    const LabeledSet train_set = data.train.labeled();
    const LabeledSet test_set = data.test.labeled();
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<double>> train_out, test_out;
    auto mode_with_seed = [](EstimatorMode m, uint64_t s) {
        m.seed = s;
        return m;
    };

    if (config.method == "qnn") {
        TrainConfig tc;
        tc.epochs = config.hyper.epochs;
        tc.batch_size = config.hyper.batch_size;
        tc.learning_rate = config.hyper.learning_rate;
        tc.mode = mode_with_seed(config.train_mode, derive_seed(seed, {1}));
        tc.seed = seed;
        TrainResult tr = train(Mlp::random(config.layers, seed), train_set, test_set, tc);
        out.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        EstimatorContext ctx(mode_with_seed(config.infer_mode, derive_seed(seed, {2})));
        for (size_t k = 0; k < train_set.size(); ++k) {
            train_out.push_back(predict_proba(tr.model, train_set.x.row(k), ctx));
        }
        for (size_t k = 0; k < test_set.size(); ++k) {
            test_out.push_back(predict_proba(tr.model, test_set.x.row(k), ctx));
        }
        out.history = std::move(tr.history);
        out.model = mlp_to_json(tr.model);
    } else {
        OrthoTrainConfig oc;
        oc.epochs = config.hyper.epochs;
        oc.batch_size = config.hyper.batch_size;
        oc.learning_rate = config.hyper.learning_rate;
        oc.seed = seed;
        oc.svb_epsilon = config.hyper.svb_epsilon;
        oc.svb_clip_every = config.hyper.svb_clip_every;
        if (config.trainer == "qpc") {
            QpcTrainResult tr = qpc_train(OrthoNet::random(config.layers, seed), train_set, test_set, oc);
            out.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const EstimatorMode base = mode_with_seed(config.infer_mode, derive_seed(seed, {2}));
            auto run = [&](const LabeledSet &set, uint64_t stream, auto &dst) {
                for (size_t k = 0; k < set.size(); ++k) {
                    dst.push_back(infer(tr.model, set.x.row(k), mode_with_seed(base, derive_seed(base.seed, {stream, k}))));
                }
            };
            run(train_set, 0, train_out);
            run(test_set, 1, test_out);
            out.history = std::move(tr.history);
            out.model = orthonet_to_json(tr.model);
        } else {
            SvbTrainResult tr = svb_train(SvbNet::random(config.layers, seed), train_set, test_set, oc);
            out.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            for (size_t k = 0; k < train_set.size(); ++k) {
                train_out.push_back(svb_forward(tr.model, train_set.x.row(k)));
            }
            for (size_t k = 0; k < test_set.size(); ++k) {
                test_out.push_back(svb_forward(tr.model, test_set.x.row(k)));
            }
            out.history = std::move(tr.history);
            json weights = json::array();
            for (const auto &w : tr.model.weights) {
                json rows = json::array();
                for (size_t r = 0; r < w.rows(); ++r) {
                    rows.push_back(std::vector<double>(w.row(r).begin(), w.row(r).end()));
                }
                weights.push_back(rows);
            }
            out.model = {{"sizes", tr.model.sizes()}, {"weights", weights}, {"rerandomized", tr.rerandomized}};
        }
    }
    out.train = make_report("train", train_out, train_set.y);
    out.test = make_report("test", test_out, test_set.y);
    return out;
}

namespace {

void write_text(const fs::path &path, const std::string &text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << text;
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

json summary_of(const std::vector<RepetitionResult> &reps) {
    std::vector<double> v[4];
    for (const auto &r : reps) {
        v[0].push_back(r.train.auc);
        v[1].push_back(r.train.acc);
        v[2].push_back(r.test.auc);
        v[3].push_back(r.test.acc);
    }
    const char *names[4] = {"train_auc", "train_acc", "test_auc", "test_acc"};
    json s;
    for (int i = 0; i < 4; ++i) {
        const MeanStd ms = mean_std(v[i]);
        s[names[i]] = {{"mean", ms.mean}, {"std", ms.std}};
    }
    return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig &config) {
    config.validate();
    if (config.output_dir.empty()) {
        throw ConfigError("output_dir", "required for a run");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const PreparedSplits data = load_data(config);
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);

    std::vector<RepetitionResult> reps;
    ExperimentResult result;
    json rep_json = json::array();
    json rep_timing = json::array();
    for (size_t k = 0; k < config.repetitions; ++k) {
        std::cerr << "[run] repetition " << k + 1 << "/" << config.repetitions << '\n';
        RepetitionResult r = run_repetition(config, data, derive_seed(config.seed, {k}));
        std::ostringstream hist;
        write_history_csv(hist, r.history);
        write_text(dir / ("history_rep" + std::to_string(k) + ".csv"), hist.str());
        write_text(dir / ("model_rep" + std::to_string(k) + ".json"), r.model.dump(1) + "\n");
        rep_json.push_back({{"rep", k},
                            {"seed", r.seed},
                            {"final_loss", r.history.empty() ? 0.0 : r.history.back().loss},
                            {"train", report_to_json(r.train)},
                            {"test", report_to_json(r.test)}});
        rep_timing.push_back({{"rep", k}, {"train_seconds", r.train_seconds}});
        reps.push_back(std::move(r));
    }
    result.metrics = {{"config", config.to_json()},
                      {"data",
                       {{"n_train", data.train.size()},
                        {"n_test", data.test.size()},
                        {"train_provenance", data.train.provenance},
                        {"test_provenance", data.test.provenance}}},
                      {"repetitions", rep_json},
                      {"summary", summary_of(reps)}};
    result.timing = {{"repetitions", rep_timing},
                     {"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    write_text(dir / "config.json", config.to_json().dump(2) + "\n");
    write_text(dir / "metrics.json", result.metrics.dump(2) + "\n");
    write_text(dir / "timing.json", result.timing.dump(2) + "\n");
    return result;
}

json dry_run(const ExperimentConfig &config) {
    config.validate();
    // Published split sizes; used only for the estimate.
    static const std::map<std::string, std::pair<size_t, size_t>> known = {{"pneumonia", {4708, 624}},
                                                                          {"retina", {1080, 400}}};
    size_t n_train = 0, n_test = 0;
    if (config.data.source == "synthetic") {
        n_train = config.data.synthetic_train;
        n_test = config.data.synthetic_test;
    } else {
        std::tie(n_train, n_test) = known.at(config.dataset);
    }
    if (config.data.subsample_per_class > 0) {
        n_train = 2 * config.data.subsample_per_class;
    } else if (config.data.train_fraction < 1.0) {
        n_train = static_cast<size_t>(std::ceil(config.data.train_fraction * static_cast<double>(n_train)));
    }
    uint64_t fwd = 0, bwd = 0;
    if (config.method == "qnn") {
        for (size_t l = 1; l < config.layers.size(); ++l) {
            fwd += config.layers[l];
            if (l + 1 < config.layers.size()) {
                bwd += config.layers[l];
            }
        }
    } else {
        fwd = config.layers.size() - 1;
    }
    const uint64_t train_circuits =
        config.train_mode.is_exact() ? 0 : config.repetitions * config.hyper.epochs * n_train * (fwd + bwd);
    const uint64_t infer_circuits = config.infer_mode.is_exact() ? 0 : config.repetitions * (n_train + n_test) * fwd;
    return {{"config", config.to_json()},
            {"estimate",
             {{"n_train", n_train},
              {"n_test", n_test},
              {"circuits_per_sample_forward", fwd},
              {"circuits_per_sample_backward", config.method == "qnn" ? bwd : 0},
              {"training_circuits", train_circuits},
              {"inference_circuits", infer_circuits},
              {"shots_per_circuit", config.infer_mode.is_exact() && config.train_mode.is_exact()
                                        ? 0
                                        : std::max(config.train_mode.is_exact() ? 0 : config.train_mode.n_shots,
                                                   config.infer_mode.is_exact() ? 0 : config.infer_mode.n_shots)}}}};
}

Table1Suite Table1Suite::from_json(const json &j) {
    Table1Suite s;
    Fields f(j, "");
    f.read("datasets", s.datasets);
    f.read("repetitions", s.repetitions);
    f.read("seed", s.seed);
    f.read("output_dir", s.output_dir);
    if (const json *b = f.get("base")) {
        s.base = *b;
    } else {
        s.base = json::object();
    }
    const json *rows = f.get("rows");
    f.finish();
    if (rows == nullptr || !rows->is_array() || rows->empty()) {
        throw ConfigError("rows", "need a non-empty array of rows");
    }
    for (size_t i = 0; i < rows->size(); ++i) {
        const json &r = (*rows)[i];
        if (!r.is_object()) {
            throw ConfigError("rows[" + std::to_string(i) + "]", "expected an object");
        }
        json overrides = r;
        const std::string label = overrides.value("label", "row" + std::to_string(i));
        overrides.erase("label");
        s.rows.push_back({label, overrides});
    }
    if (s.output_dir.empty()) {
        throw ConfigError("output_dir", "required");
    }
    if (s.repetitions == 0) {
        throw ConfigError("repetitions", "must be positive");
    }
    if (s.datasets.empty()) {
        throw ConfigError("datasets", "need at least one dataset");
    }
    for (size_t r = 0; r < s.rows.size(); ++r) {
        for (const auto &d : s.datasets) {
            try {
                s.cell_config(r, d);
            } catch (const ConfigError &e) {
                throw ConfigError("rows[" + std::to_string(r) + "]." + e.field(), e.message());
            }
        }
    }
    return s;
}

ExperimentConfig Table1Suite::cell_config(size_t row, const std::string &dataset) const {
    json j = base;
    for (const auto &item : rows.at(row).overrides.items()) {
        j[item.key()] = item.value();
    }
    j["dataset"] = dataset;
    j.erase("task");
    j["repetitions"] = repetitions;
    j["seed"] = seed;
    if (!j.contains("pca_k") && j.contains("layers") && j["layers"].is_array() && !j["layers"].empty()) {
        j["pca_k"] = j["layers"][0];
    }
    return ExperimentConfig::from_json(j);
}

Table1Result table1_runner(const Table1Suite &suite, size_t jobs) {
    const fs::path dir(suite.output_dir);
    const fs::path cells_dir = dir / "cells";
    fs::create_directories(cells_dir);
    struct Task {
        size_t row, dataset, rep;
        fs::path path;
    };
    std::vector<Task> todo;
    std::vector<std::vector<std::vector<json>>> found(
        suite.rows.size(), std::vector<std::vector<json>>(suite.datasets.size(), std::vector<json>(suite.repetitions)));
    Table1Result result;
    std::map<std::string, PreparedSplits> data;
    for (size_t r = 0; r < suite.rows.size(); ++r) {
        for (size_t d = 0; d < suite.datasets.size(); ++d) {
            for (size_t k = 0; k < suite.repetitions; ++k) {
                const fs::path p =
                    cells_dir / ("row" + std::to_string(r) + "_" + suite.datasets[d] + "_rep" + std::to_string(k) + ".json");
                if (fs::exists(p)) {
                    try {
                        std::ifstream in(p);
                        found[r][d][k] = json::parse(in);
                        report_from_json(found[r][d][k].at("test"));
                        ++result.reused;
                        continue;
                    } catch (const std::exception &) {
                        // Unreadable artifact: recompute.
                    }
                }
                todo.push_back({r, d, k, p});
                const ExperimentConfig cfg = suite.cell_config(r, suite.datasets[d]);
                json key = cfg.to_json();
                const std::string data_key = json({key["dataset"], key["pca_k"], key["normalize"], key["data"]}).dump();
                if (data.count(data_key) == 0) {
                    data.emplace(data_key, load_data(cfg));
                }
            }
        }
    }

    std::atomic<size_t> next{0};
    std::mutex mu;
    std::exception_ptr failure;
    auto worker = [&]() {
        for (size_t i = next++; i < todo.size(); i = next++) {
            try {
                const Task &t = todo[i];
                const ExperimentConfig cfg = suite.cell_config(t.row, suite.datasets[t.dataset]);
                json key = cfg.to_json();
                const std::string data_key = json({key["dataset"], key["pca_k"], key["normalize"], key["data"]}).dump();
                const uint64_t seed = derive_seed(suite.seed, {t.rep});
                const RepetitionResult rr = run_repetition(cfg, data.at(data_key), seed);
                json cell = {{"label", suite.rows[t.row].label},
                             {"dataset", suite.datasets[t.dataset]},
                             {"rep", t.rep},
                             {"seed", seed},
                             {"train", report_to_json(rr.train)},
                             {"test", report_to_json(rr.test)}};
                write_text(t.path, cell.dump(2) + "\n");
                std::lock_guard<std::mutex> lock(mu);
                found[t.row][t.dataset][t.rep] = std::move(cell);
                ++result.computed;
                std::cerr << "[table1] " << suite.rows[t.row].label << " / " << suite.datasets[t.dataset] << " rep "
                          << t.rep << " done\n";
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = todo.size();
            }
        }
    };
    std::vector<std::thread> pool;
    for (size_t w = 1; w < std::max<size_t>(jobs, 1); ++w) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    result.datasets = suite.datasets;
    json table = json::array();
    std::ostringstream csv;
    csv << "label";
    for (const auto &d : suite.datasets) {
        for (const char *m : {"auc_train", "auc_test", "acc_train", "acc_test"}) {
            csv << ',' << d << '_' << m << "_mean," << d << '_' << m << "_std";
        }
    }
    csv << '\n';
    csv.precision(6);
    for (size_t r = 0; r < suite.rows.size(); ++r) {
        result.labels.push_back(suite.rows[r].label);
        std::vector<Table1Cell> row_cells;
        csv << '"' << suite.rows[r].label << '"';
        json jrow = {{"label", suite.rows[r].label}};
        for (size_t d = 0; d < suite.datasets.size(); ++d) {
            std::vector<double> v[4];
            for (const json &cell : found[r][d]) {
                v[0].push_back(cell.at("train").at("auc").get<double>());
                v[1].push_back(cell.at("test").at("auc").get<double>());
                v[2].push_back(cell.at("train").at("acc").get<double>());
                v[3].push_back(cell.at("test").at("acc").get<double>());
            }
            Table1Cell c{mean_std(v[0]), mean_std(v[1]), mean_std(v[2]), mean_std(v[3])};
            for (const MeanStd &ms : {c.auc_train, c.auc_test, c.acc_train, c.acc_test}) {
                csv << ',' << ms.mean << ',' << ms.std;
            }
            jrow[suite.datasets[d]] = {{"auc_train", {c.auc_train.mean, c.auc_train.std}},
                                       {"auc_test", {c.auc_test.mean, c.auc_test.std}},
                                       {"acc_train", {c.acc_train.mean, c.acc_train.std}},
                                       {"acc_test", {c.acc_test.mean, c.acc_test.std}}};
            row_cells.push_back(c);
        }
        csv << '\n';
        table.push_back(jrow);
        result.cells.push_back(std::move(row_cells));
    }
    write_text(dir / "table1.csv", csv.str());
    write_text(dir / "table1.json", json({{"repetitions", suite.repetitions}, {"rows", table}}).dump(2) + "\n");
    return result;
}

}  // namespace uqnn
