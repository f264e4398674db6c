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


#include "uqnn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "uqnn/qnn.hpp"

namespace uqnn {

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("auc: scores and labels differ in length");
    }
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // Mid-ranks over tie groups, then the rank-sum form of the U statistic.
    double rank_sum_pos = 0.0;
    uint64_t n_pos = 0;
    for (size_t i = 0; i < order.size();) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            ++j;
        }
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (size_t t = i; t < j; ++t) {
            if (labels[order[t]] == 1) {
                rank_sum_pos += mid_rank;
                ++n_pos;
            }
        }
        i = j;
    }
    const uint64_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("auc: both classes must be present");
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

AccConfusion acc_and_confusion(std::span<const int> predicted, std::span<const int> labels) {
    if (predicted.size() != labels.size()) {
        throw std::invalid_argument("acc_and_confusion: length mismatch");
    }
    AccConfusion out;
    for (size_t i = 0; i < labels.size(); ++i) {
        if ((labels[i] != 0 && labels[i] != 1) || (predicted[i] != 0 && predicted[i] != 1)) {
            throw std::invalid_argument("acc_and_confusion: classes must be 0 or 1");
        }
        ++out.confusion[static_cast<size_t>(labels[i])][static_cast<size_t>(predicted[i])];
    }
    if (!labels.empty()) {
        out.acc = static_cast<double>(out.confusion[0][0] + out.confusion[1][1]) / static_cast<double>(labels.size());
    }
    return out;
}

MetricsReport make_report(const std::string &split, const std::vector<std::vector<double>> &outputs,
                          std::span<const int> labels) {
    std::vector<double> scores;
    std::vector<int> predicted;
    for (const auto &o : outputs) {
        scores.push_back(o.at(1) - o.at(0));
        predicted.push_back(argmax2(o));
    }
    const AccConfusion ac = acc_and_confusion(predicted, labels);
    MetricsReport r;
    r.split = split;
    r.n = labels.size();
    r.acc = ac.acc;
    r.confusion = ac.confusion;
    r.auc = auc(scores, labels);
    return r;
}

nlohmann::json report_to_json(const MetricsReport &r) {
    return {{"split", r.split}, {"n", r.n}, {"auc", r.auc}, {"acc", r.acc}, {"confusion", r.confusion}};
}

MetricsReport report_from_json(const nlohmann::json &j) {
    MetricsReport r;
    r.split = j.at("split").get<std::string>();
    r.n = j.at("n").get<size_t>();
    r.auc = j.at("auc").get<double>();
    r.acc = j.at("acc").get<double>();
    r.confusion = j.at("confusion").get<Confusion>();
    return r;
}

MeanStd mean_std(std::span<const double> v) {
    MeanStd out;
    if (v.empty()) {
        return out;
    }
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) {
            ss += (x - out.mean) * (x - out.mean);
        }
        out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return out;
}

CrossoverReport crossover_report(uint64_t shots) {
    CrossoverReport r;
    r.shots = shots;
    r.crossover = crossover_dimension(shots);
    r.crossover_continuous = crossover_dimension_continuous(shots);
    std::vector<uint64_t> ns;
    for (uint64_t n = 2; n <= (uint64_t{1} << 20); n *= 2) {
        ns.push_back(n);
    }
    ns.push_back(10000);
    ns.push_back(r.crossover);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (uint64_t n : ns) {
        r.rows.push_back({n, quantum_step_count(n, shots), classical_step_count(n),
                          quantum_step_count_continuous(static_cast<double>(n), shots)});
    }
    return r;
}

void write_crossover_csv(std::ostream &os, const CrossoverReport &r) {
    os << "n,quantum_steps,classical_steps,quantum_steps_continuous\n";
    os.precision(10);
    for (const auto &row : r.rows) {
        os << row.n << ',' << row.quantum << ',' << row.classical << ',' << row.quantum_continuous << '\n';
    }
}

nlohmann::json crossover_to_json(const CrossoverReport &r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : r.rows) {
        rows.push_back({{"n", row.n},
                        {"quantum_steps", row.quantum},
                        {"classical_steps", row.classical},
                        {"quantum_steps_continuous", row.quantum_continuous}});
    }
    return {{"shots", r.shots},
            {"crossover", r.crossover},
            {"crossover_continuous", r.crossover_continuous},
            {"rows", rows}};
}

void write_scaling_csv(std::ostream &os, const std::vector<ScalingRow> &rows) {
    os << "n,param_total,sample_passes,op_count,wall_seconds\n";
    os.precision(9);
    for (const auto &r : rows) {
        os << r.n << ',' << r.param_total << ',' << r.sample_passes << ',' << r.op_count << ',' << r.wall_seconds
           << '\n';
    }
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_slope: need at least two paired points");
    }
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

}  // namespace uqnn
