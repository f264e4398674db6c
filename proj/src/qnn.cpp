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


#include "uqnn/qnn.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "uqnn/rng.hpp"

namespace uqnn {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double sigmoid_xent(double z, double y) {
    const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return softplus - y * z;
}

int argmax2(std::span<const double> out) {
    if (out.size() != 2) {
        throw std::invalid_argument("argmax2: expected two output nodes");
    }
    return out[1] > out[0] ? 1 : 0;
}

void write_history_csv(std::ostream &os, const History &history) {
    os << "epoch,loss,train_acc,test_acc\n";
    os.precision(17);
    for (const auto &r : history) {
        os << r.epoch << ',' << r.loss << ',' << r.train_acc << ',' << r.test_acc << '\n';
    }
}

Mlp Mlp::zeros(const std::vector<size_t> &layer_sizes) {
    if (layer_sizes.size() < 2) {
        throw std::invalid_argument("Mlp: need at least an input and an output layer");
    }
    Mlp m;
    m.layer_sizes = layer_sizes;
    for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        if (layer_sizes[l] == 0 || layer_sizes[l + 1] == 0) {
            throw std::invalid_argument("Mlp: layer sizes must be positive");
        }
        m.weights.emplace_back(layer_sizes[l + 1], layer_sizes[l]);
        m.biases.emplace_back(layer_sizes[l + 1], 0.0);
    }
    return m;
}

Mlp Mlp::random(const std::vector<size_t> &layer_sizes, uint64_t seed) {
    Mlp m = zeros(layer_sizes);
    Rng rng(derive_seed(seed, {0x1417}));
    for (auto &w : m.weights) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
        for (double &v : w.data()) {
            v = rng.uniform(-bound, bound);
        }
    }
    return m;
}

void Mlp::validate() const {
    if (layer_sizes.size() < 2 || weights.size() + 1 != layer_sizes.size() || biases.size() != weights.size()) {
        throw std::invalid_argument("Mlp: layer count mismatch");
    }
    for (size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l] ||
            biases[l].size() != layer_sizes[l + 1]) {
            throw std::invalid_argument("Mlp: shape of layer " + std::to_string(l) + " is inconsistent");
        }
        for (double v : weights[l].data()) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("Mlp: non-finite weight");
            }
        }
        for (double v : biases[l]) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("Mlp: non-finite bias");
            }
        }
    }
}

void TrainConfig::validate() const {
    if (epochs == 0 || batch_size == 0 || !(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("TrainConfig: epochs and batch_size must be positive, learning_rate >= 0");
    }
}

ForwardPass forward(const Mlp &mlp, std::span<const double> x, EstimatorContext &ctx) {
    if (x.size() != mlp.input_dim()) {
        throw std::invalid_argument("Mlp forward: input has dimension " + std::to_string(x.size()) + ", expected " +
                                    std::to_string(mlp.input_dim()));
    }
    ForwardPass fp;
    fp.a.emplace_back(x.begin(), x.end());
    for (size_t l = 0; l < mlp.n_layers(); ++l) {
        std::vector<double> z = estimate_matvec(mlp.weights[l], fp.a.back(), ctx.mode(), ctx.next_call());
        std::vector<double> a(z.size());
        for (size_t j = 0; j < z.size(); ++j) {
            z[j] += mlp.biases[l][j];
            a[j] = sigmoid(z[j]);
        }
        fp.z.push_back(std::move(z));
        fp.a.push_back(std::move(a));
    }
    return fp;
}

namespace {

double target(int label, size_t node) { return static_cast<size_t>(label) == node ? 1.0 : 0.0; }

void check_batch(const Mlp &mlp, const Matrix &x, std::span<const int> labels) {
    if (x.rows() != labels.size() || x.rows() == 0) {
        throw std::invalid_argument("batch: need a non-empty batch with one label per row");
    }
    if (mlp.layer_sizes.back() != 2) {
        throw std::invalid_argument("batch: binary one-hot targets need two output nodes");
    }
}

}  // namespace

Gradients gradients(const Mlp &mlp, const Matrix &batch_x, std::span<const int> labels, EstimatorContext &ctx) {
    check_batch(mlp, batch_x, labels);
    const size_t n_layers = mlp.n_layers();
    Gradients g;
    for (size_t l = 0; l < n_layers; ++l) {
        g.weights.emplace_back(mlp.weights[l].rows(), mlp.weights[l].cols());
        g.biases.emplace_back(mlp.biases[l].size(), 0.0);
    }

    for (size_t k = 0; k < batch_x.rows(); ++k) {
        const ForwardPass fp = forward(mlp, batch_x.row(k), ctx);
        const auto &z_out = fp.z.back();
        std::vector<double> delta(z_out.size());
        for (size_t j = 0; j < z_out.size(); ++j) {
            const double y = target(labels[k], j);
            g.loss += sigmoid_xent(z_out[j], y);
            delta[j] = fp.a.back()[j] - y;
        }
        for (size_t l = n_layers; l-- > 0;) {
            const auto &a_in = fp.a[l];
            Matrix &gw = g.weights[l];
            for (size_t r = 0; r < gw.rows(); ++r) {
                for (size_t c = 0; c < gw.cols(); ++c) {
                    gw(r, c) += delta[r] * a_in[c];
                }
                g.biases[l][r] += delta[r];
            }
            if (l == 0) {
                break;
            }
            std::vector<double> back =
                estimate_matvec_transposed(mlp.weights[l], delta, ctx.mode(), ctx.next_call());
            for (size_t c = 0; c < back.size(); ++c) {
                back[c] *= a_in[c] * (1.0 - a_in[c]);
            }
            delta = std::move(back);
        }
    }

    const double inv = 1.0 / static_cast<double>(batch_x.rows());
    for (size_t l = 0; l < n_layers; ++l) {
        for (double &v : g.weights[l].data()) {
            v *= inv;
        }
        for (double &v : g.biases[l]) {
            v *= inv;
        }
    }
    g.loss *= inv;
    return g;
}

double loss(const Mlp &mlp, const Matrix &x, std::span<const int> labels) {
    check_batch(mlp, x, labels);
    EstimatorContext ctx;
    double total = 0.0;
    for (size_t k = 0; k < x.rows(); ++k) {
        const ForwardPass fp = forward(mlp, x.row(k), ctx);
        for (size_t j = 0; j < fp.z.back().size(); ++j) {
            total += sigmoid_xent(fp.z.back()[j], target(labels[k], j));
        }
    }
    return total / static_cast<double>(x.rows());
}

double backprop_step(Mlp &mlp, const Matrix &batch_x, std::span<const int> labels, const TrainConfig &config,
                     EstimatorContext &ctx) {
    const Gradients g = gradients(mlp, batch_x, labels, ctx);
    const double eta = config.learning_rate;
    for (size_t l = 0; l < mlp.n_layers(); ++l) {
        auto w = mlp.weights[l].data();
        auto gw = g.weights[l].data();
        for (size_t i = 0; i < w.size(); ++i) {
            w[i] -= eta * gw[i];
        }
        for (size_t j = 0; j < mlp.biases[l].size(); ++j) {
            mlp.biases[l][j] -= eta * g.biases[l][j];
        }
    }
    return g.loss;
}

std::vector<double> predict_proba(const Mlp &mlp, std::span<const double> x, EstimatorContext &ctx) {
    return forward(mlp, x, ctx).output();
}

int classify(const Mlp &mlp, std::span<const double> x, EstimatorContext &ctx) {
    return argmax2(predict_proba(mlp, x, ctx));
}

double accuracy(const Mlp &mlp, const LabeledSet &set, EstimatorContext &ctx) {
    if (set.size() == 0) {
        return 0.0;
    }
    size_t correct = 0;
    for (size_t k = 0; k < set.size(); ++k) {
        correct += classify(mlp, set.x.row(k), ctx) == set.y[k] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(set.size());
}

TrainResult train(Mlp mlp, const LabeledSet &train_set, const LabeledSet &test_set, const TrainConfig &config) {
    config.validate();
    mlp.validate();
    train_set.validate();
    if (train_set.size() == 0) {
        throw std::invalid_argument("train: empty training set");
    }
    Rng order_rng(derive_seed(config.seed, {0x5407}));
    EstimatorContext ctx(config.mode);
    std::vector<size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), size_t{0});

    TrainResult result;
    for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        order_rng.shuffle(std::span<size_t>(order));
        double loss_sum = 0.0;
        for (size_t start = 0; start < order.size(); start += config.batch_size) {
            const size_t end = std::min(order.size(), start + config.batch_size);
            const LabeledSet batch = train_set.subset({order.begin() + start, order.begin() + end});
            loss_sum += backprop_step(mlp, batch.x, batch.y, config, ctx) * static_cast<double>(end - start);
        }
        EstimatorContext exact;
        EpochRecord rec;
        rec.epoch = epoch;
        rec.loss = loss_sum / static_cast<double>(order.size());
        rec.train_acc = accuracy(mlp, train_set, exact);
        rec.test_acc = accuracy(mlp, test_set, exact);
        result.history.push_back(rec);
    }
    result.model = std::move(mlp);
    return result;
}

nlohmann::json mlp_to_json(const Mlp &mlp) {
    nlohmann::json weights = nlohmann::json::array();
    for (const auto &w : mlp.weights) {
        nlohmann::json rows = nlohmann::json::array();
        for (size_t r = 0; r < w.rows(); ++r) {
            rows.push_back(std::vector<double>(w.row(r).begin(), w.row(r).end()));
        }
        weights.push_back(std::move(rows));
    }
    return {{"layer_sizes", mlp.layer_sizes}, {"weights", weights}, {"biases", mlp.biases}};
}

Mlp mlp_from_json(const nlohmann::json &j) {
    Mlp m = Mlp::zeros(j.at("layer_sizes").get<std::vector<size_t>>());
    const auto &weights = j.at("weights");
    if (weights.size() != m.n_layers()) {
        throw std::invalid_argument("Mlp checkpoint: wrong number of weight matrices");
    }
    for (size_t l = 0; l < m.n_layers(); ++l) {
        const auto rows = weights[l].get<std::vector<std::vector<double>>>();
        if (rows.size() != m.weights[l].rows()) {
            throw std::invalid_argument("Mlp checkpoint: wrong row count in layer " + std::to_string(l));
        }
        for (size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.weights[l].cols()) {
                throw std::invalid_argument("Mlp checkpoint: wrong column count in layer " + std::to_string(l));
            }
            std::copy(rows[r].begin(), rows[r].end(), m.weights[l].row(r).begin());
        }
    }
    m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    m.validate();
    return m;
}

}  // namespace uqnn
