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


#include "uqnn/orthonn.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "uqnn/rng.hpp"

namespace uqnn {

namespace {

PyramidLayer random_layer(size_t n_in, size_t n_out, Rng &rng) {
    std::vector<double> theta(param_count(n_in, n_out));
    for (double &t : theta) {
        t = rng.uniform(-std::numbers::pi / 4.0, std::numbers::pi / 4.0);
    }
    return PyramidLayer(n_in, n_out, std::move(theta));
}

void check_sizes(const std::vector<size_t> &sizes) {
    if (sizes.size() < 2) {
        throw std::invalid_argument("orthogonal net: need at least two layer sizes");
    }
    if (sizes.back() != 2) {
        throw std::invalid_argument("orthogonal net: the last layer must have two outputs");
    }
}

/// cos/sin of every gate of a layer, in plan order.
struct Trig {
    std::vector<double> c;
    std::vector<double> s;
};

std::vector<Trig> trig_tables(const OrthoNet &net) {
    std::vector<Trig> out;
    for (const auto &layer : net.layers) {
        Trig t;
        for (double theta : layer.theta()) {
            t.c.push_back(std::cos(theta));
            t.s.push_back(std::sin(theta));
        }
        out.push_back(std::move(t));
    }
    return out;
}

void forward_cached(const OrthoNet &net, const std::vector<Trig> &trig, std::span<const double> x, QpcCache &cache,
                    uint64_t *rotations) {
    const size_t n_layers = net.layers.size();
    cache.layers.resize(n_layers);
    cache.a.resize(n_layers + 1);
    cache.z.resize(n_layers);
    cache.a[0].assign(x.begin(), x.end());
    for (size_t l = 0; l < n_layers; ++l) {
        const PyramidLayer &layer = net.layers[l];
        const auto &in = cache.a[l];
        if (in.size() != layer.n_in()) {
            throw std::invalid_argument("qpc_forward: input has dimension " + std::to_string(in.size()) +
                                        ", layer expects " + std::to_string(layer.n_in()));
        }
        LayerCache &lc = cache.layers[l];
        lc.norm = norm2(in);
        std::vector<double> v(in.size(), 0.0);
        if (lc.norm > 0.0) {
            for (size_t i = 0; i < v.size(); ++i) {
                v[i] = in[i] / lc.norm;
            }
        }
        const auto &plan = layer.plan();
        lc.pre.resize(2 * plan.size());
        const Trig &t = trig[l];
        for (size_t k = 0; k < plan.size(); ++k) {
            double &lo = v[plan[k].wire];
            double &hi = v[plan[k].wire + 1];
            lc.pre[2 * k] = lo;
            lc.pre[2 * k + 1] = hi;
            const double nlo = t.c[k] * lo + t.s[k] * hi;
            const double nhi = -t.s[k] * lo + t.c[k] * hi;
            lo = nlo;
            hi = nhi;
        }
        if (rotations != nullptr) {
            *rotations += plan.size();
        }
        auto &z = cache.z[l];
        auto &a = cache.a[l + 1];
        z.resize(layer.n_out());
        a.resize(layer.n_out());
        for (size_t j = 0; j < layer.n_out(); ++j) {
            z[j] = lc.norm * layer.row_signs()[j] * v[j];
            a[j] = sigmoid(z[j]);
        }
    }
}

double backward_cached(const OrthoNet &net, const std::vector<Trig> &trig, const QpcCache &cache, int label,
                       QpcGradients &grad, uint64_t *rotations) {
    const size_t n_layers = net.layers.size();
    if (cache.layers.size() != n_layers || cache.a.size() != n_layers + 1) {
        throw std::invalid_argument("qpc_backward: cache does not belong to this network");
    }
    if (grad.theta.size() != n_layers) {
        grad.theta.resize(n_layers);
        for (size_t l = 0; l < n_layers; ++l) {
            grad.theta[l].assign(net.layers[l].theta().size(), 0.0);
        }
    }
    const auto &z_out = cache.z.back();
    const auto &a_out = cache.a.back();
    double sample_loss = 0.0;
    std::vector<double> delta(z_out.size());
    for (size_t j = 0; j < z_out.size(); ++j) {
        const double y = static_cast<size_t>(label) == j ? 1.0 : 0.0;
        sample_loss += sigmoid_xent(z_out[j], y);
        delta[j] = a_out[j] - y;
    }

    for (size_t l = n_layers; l-- > 0;) {
        const PyramidLayer &layer = net.layers[l];
        const LayerCache &lc = cache.layers[l];
        const auto &plan = layer.plan();
        if (lc.pre.size() != 2 * plan.size()) {
            throw std::invalid_argument("qpc_backward: missing forward cache");
        }
        std::vector<double> d(layer.n_in(), 0.0);
        for (size_t j = 0; j < layer.n_out(); ++j) {
            d[j] = delta[j] * layer.row_signs()[j];
        }
        const Trig &t = trig[l];
        auto &g = grad.theta[l];
        for (size_t k = plan.size(); k-- > 0;) {
            double &dlo = d[plan[k].wire];
            double &dhi = d[plan[k].wire + 1];
            const double p = lc.pre[2 * k];
            const double q = lc.pre[2 * k + 1];
            const double c = t.c[k];
            const double s = t.s[k];
            g[k] += lc.norm * (dlo * (-s * p + c * q) + dhi * (-c * p - s * q));
            const double nlo = c * dlo - s * dhi;
            const double nhi = s * dlo + c * dhi;
            dlo = nlo;
            dhi = nhi;
        }
        if (rotations != nullptr) {
            *rotations += plan.size();
        }
        if (l == 0) {
            break;
        }
        const auto &a_in = cache.a[l];
        for (size_t i = 0; i < d.size(); ++i) {
            d[i] *= a_in[i] * (1.0 - a_in[i]);
        }
        delta = std::move(d);
    }
    return sample_loss;
}

void check_batch(const Matrix &x, std::span<const int> labels) {
    if (x.rows() == 0 || x.rows() != labels.size()) {
        throw std::invalid_argument("batch: need a non-empty batch with one label per row");
    }
}

double classify_rows(const LabeledSet &set, auto &&predict) {
    if (set.size() == 0) {
        return 0.0;
    }
    size_t correct = 0;
    for (size_t k = 0; k < set.size(); ++k) {
        correct += argmax2(predict(k)) == set.y[k] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(set.size());
}

}  // namespace

OrthoNet OrthoNet::random(const std::vector<size_t> &sizes, uint64_t seed) {
    check_sizes(sizes);
    Rng rng(derive_seed(seed, {0x0a7e}));
    OrthoNet net;
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
        net.layers.push_back(random_layer(sizes[l], sizes[l + 1], rng));
    }
    return net;
}

std::vector<size_t> OrthoNet::sizes() const {
    std::vector<size_t> out;
    for (const auto &layer : layers) {
        if (out.empty()) {
            out.push_back(layer.n_in());
        }
        out.push_back(layer.n_out());
    }
    return out;
}

size_t OrthoNet::param_total() const {
    size_t total = 0;
    for (const auto &layer : layers) {
        total += layer.theta().size();
    }
    return total;
}

QpcCache qpc_forward(const OrthoNet &net, std::span<const double> x, uint64_t *rotations) {
    QpcCache cache;
    forward_cached(net, trig_tables(net), x, cache, rotations);
    return cache;
}

double qpc_backward(const OrthoNet &net, const QpcCache &cache, int label, QpcGradients &grad,
                    uint64_t *rotations) {
    return backward_cached(net, trig_tables(net), cache, label, grad, rotations);
}

QpcGradients qpc_gradients(const OrthoNet &net, const Matrix &batch_x, std::span<const int> labels,
                           uint64_t *rotations) {
    check_batch(batch_x, labels);
    const std::vector<Trig> trig = trig_tables(net);
    QpcGradients grad;
    QpcCache cache;
    for (size_t k = 0; k < batch_x.rows(); ++k) {
        forward_cached(net, trig, batch_x.row(k), cache, rotations);
        grad.loss += backward_cached(net, trig, cache, labels[k], grad, rotations);
    }
    const double inv = 1.0 / static_cast<double>(batch_x.rows());
    for (auto &g : grad.theta) {
        for (double &v : g) {
            v *= inv;
        }
    }
    grad.loss *= inv;
    return grad;
}

double qpc_step(OrthoNet &net, const Matrix &batch_x, std::span<const int> labels, double learning_rate,
                uint64_t *rotations) {
    const QpcGradients grad = qpc_gradients(net, batch_x, labels, rotations);
    for (size_t l = 0; l < net.layers.size(); ++l) {
        auto &theta = net.layers[l].theta();
        for (size_t k = 0; k < theta.size(); ++k) {
            theta[k] -= learning_rate * grad.theta[l][k];
        }
    }
    return grad.loss;
}

double qpc_loss(const OrthoNet &net, const Matrix &x, std::span<const int> labels) {
    check_batch(x, labels);
    double total = 0.0;
    for (size_t k = 0; k < x.rows(); ++k) {
        const QpcCache cache = qpc_forward(net, x.row(k));
        for (size_t j = 0; j < cache.z.back().size(); ++j) {
            total += sigmoid_xent(cache.z.back()[j], static_cast<size_t>(labels[k]) == j ? 1.0 : 0.0);
        }
    }
    return total / static_cast<double>(x.rows());
}

void OrthoTrainConfig::validate() const {
    if (epochs == 0 || batch_size == 0 || svb_clip_every == 0 || !(learning_rate >= 0.0) ||
        !std::isfinite(learning_rate) || !(svb_epsilon >= 0.0)) {
        throw std::invalid_argument(
            "OrthoTrainConfig: epochs, batch_size, svb_clip_every must be positive; learning_rate, "
            "svb_epsilon >= 0");
    }
}

namespace {

/// Shared epoch loop: `step` trains on one batch and returns its loss,
/// `acc` measures accuracy on a set.
template <class Step, class Acc>
History epoch_loop(const LabeledSet &train_set, const LabeledSet &test_set, const OrthoTrainConfig &config,
                   Step &&step, Acc &&acc) {
    config.validate();
    train_set.validate();
    if (train_set.size() == 0) {
        throw std::invalid_argument("train: empty training set");
    }
    Rng order_rng(derive_seed(config.seed, {0x5407}));
    std::vector<size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), size_t{0});
    History history;
    for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        order_rng.shuffle(std::span<size_t>(order));
        double loss_sum = 0.0;
        for (size_t start = 0; start < order.size(); start += config.batch_size) {
            const size_t end = std::min(order.size(), start + config.batch_size);
            const LabeledSet batch = train_set.subset({order.begin() + start, order.begin() + end});
            loss_sum += step(batch) * static_cast<double>(end - start);
        }
        history.push_back({epoch, loss_sum / static_cast<double>(order.size()), acc(train_set), acc(test_set)});
    }
    return history;
}

}  // namespace

QpcTrainResult qpc_train(OrthoNet net, const LabeledSet &train_set, const LabeledSet &test_set,
                         const OrthoTrainConfig &config) {
    QpcTrainResult result;
    result.history = epoch_loop(
        train_set, test_set, config,
        [&](const LabeledSet &batch) {
            return qpc_step(net, batch.x, batch.y, config.learning_rate, &result.rotations);
        },
        [&](const LabeledSet &set) { return ortho_accuracy(net, set, EstimatorMode::exact()); });
    result.model = std::move(net);
    return result;
}

std::vector<double> infer(const OrthoNet &net, std::span<const double> x, const EstimatorMode &mode) {
    std::vector<double> a(x.begin(), x.end());
    for (size_t l = 0; l < net.layers.size(); ++l) {
        const EstimatorMode layer_mode =
            mode.is_exact() ? mode : EstimatorMode::sampled(mode.n_shots, derive_seed(mode.seed, {l}));
        std::vector<double> z;
        if (mode.is_exact()) {
            // Same arithmetic as the training forward pass.
            const double norm = norm2(a);
            std::vector<double> v(a.size(), 0.0);
            if (norm > 0.0) {
                for (size_t i = 0; i < a.size(); ++i) {
                    v[i] = a[i] / norm;
                }
            }
            z = forward(net.layers[l], v);
            for (double &zj : z) {
                zj *= norm;
            }
        } else {
            z = estimate_layer_output(net.layers[l], a, layer_mode);
        }
        for (double &zj : z) {
            zj = sigmoid(zj);
        }
        a = std::move(z);
    }
    return a;
}

double ortho_accuracy(const OrthoNet &net, const LabeledSet &set, const EstimatorMode &mode) {
    return classify_rows(set, [&](size_t k) {
        EstimatorMode m = mode;
        if (!m.is_exact()) {
            m.seed = derive_seed(mode.seed, {k});
        }
        return infer(net, set.x.row(k), m);
    });
}

SvbNet SvbNet::random(const std::vector<size_t> &sizes, uint64_t seed) {
    const OrthoNet init = OrthoNet::random(sizes, seed);
    SvbNet net;
    for (const auto &layer : init.layers) {
        net.weights.push_back(angles_to_matrix(layer));
    }
    return net;
}

std::vector<size_t> SvbNet::sizes() const {
    std::vector<size_t> out;
    for (const auto &w : weights) {
        if (out.empty()) {
            out.push_back(w.cols());
        }
        out.push_back(w.rows());
    }
    return out;
}

std::vector<double> svb_forward(const SvbNet &net, std::span<const double> x) {
    std::vector<double> a(x.begin(), x.end());
    for (const auto &w : net.weights) {
        a = matvec(w, a);
        for (double &v : a) {
            v = sigmoid(v);
        }
    }
    return a;
}

namespace {

Eigen::MatrixXd to_eigen(const Matrix &w) {
    Eigen::MatrixXd m(w.rows(), w.cols());
    for (size_t r = 0; r < w.rows(); ++r) {
        for (size_t c = 0; c < w.cols(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w(r, c);
        }
    }
    return m;
}

}  // namespace

std::vector<double> singular_values(const Matrix &w) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(w));
    const Eigen::VectorXd s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

bool clip_singular_values(Matrix &w, double lo, double hi) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(w), Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        s[i] = std::clamp(s[i], lo, hi);
    }
    const Eigen::MatrixXd out = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
    if (!out.allFinite()) {
        return false;
    }
    for (size_t r = 0; r < w.rows(); ++r) {
        for (size_t c = 0; c < w.cols(); ++c) {
            w(r, c) = out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return true;
}

namespace {

double svb_step(SvbNet &net, const LabeledSet &batch, double learning_rate) {
    const size_t n_layers = net.weights.size();
    std::vector<Matrix> g;
    for (const auto &w : net.weights) {
        g.emplace_back(w.rows(), w.cols());
    }
    double loss_sum = 0.0;
    for (size_t k = 0; k < batch.size(); ++k) {
        std::vector<std::vector<double>> a{std::vector<double>(batch.x.row(k).begin(), batch.x.row(k).end())};
        std::vector<double> z;
        for (const auto &w : net.weights) {
            z = matvec(w, a.back());
            std::vector<double> act(z.size());
            for (size_t j = 0; j < z.size(); ++j) {
                act[j] = sigmoid(z[j]);
            }
            a.push_back(std::move(act));
        }
        std::vector<double> delta(z.size());
        for (size_t j = 0; j < z.size(); ++j) {
            const double y = static_cast<size_t>(batch.y[k]) == j ? 1.0 : 0.0;
            loss_sum += sigmoid_xent(z[j], y);
            delta[j] = a.back()[j] - y;
        }
        for (size_t l = n_layers; l-- > 0;) {
            const Matrix &w = net.weights[l];
            for (size_t r = 0; r < w.rows(); ++r) {
                for (size_t c = 0; c < w.cols(); ++c) {
                    g[l](r, c) += delta[r] * a[l][c];
                }
            }
            if (l == 0) {
                break;
            }
            std::vector<double> back(w.cols(), 0.0);
            for (size_t r = 0; r < w.rows(); ++r) {
                for (size_t c = 0; c < w.cols(); ++c) {
                    back[c] += w(r, c) * delta[r];
                }
            }
            for (size_t c = 0; c < back.size(); ++c) {
                back[c] *= a[l][c] * (1.0 - a[l][c]);
            }
            delta = std::move(back);
        }
    }
    const double scale = learning_rate / static_cast<double>(batch.size());
    for (size_t l = 0; l < n_layers; ++l) {
        auto w = net.weights[l].data();
        auto gl = g[l].data();
        for (size_t i = 0; i < w.size(); ++i) {
            w[i] -= scale * gl[i];
        }
    }
    return loss_sum / static_cast<double>(batch.size());
}

}  // namespace

SvbTrainResult svb_train(SvbNet net, const LabeledSet &train_set, const LabeledSet &test_set,
                         const OrthoTrainConfig &config) {
    SvbTrainResult result;
    const double hi = 1.0 + config.svb_epsilon;
    const double lo = 1.0 / hi;
    Rng reinit_rng(derive_seed(config.seed, {0x5eb}));
    size_t steps = 0;
    result.history = epoch_loop(
        train_set, test_set, config,
        [&](const LabeledSet &batch) {
            const double batch_loss = svb_step(net, batch, config.learning_rate);
            if (++steps % config.svb_clip_every == 0 && std::isfinite(hi)) {
                for (size_t l = 0; l < net.weights.size(); ++l) {
                    if (!clip_singular_values(net.weights[l], lo, hi)) {
                        std::cerr << "svb: SVD failed on layer " << l << ", re-randomizing it\n";
                        net.weights[l] = angles_to_matrix(
                            random_layer(net.weights[l].cols(), net.weights[l].rows(), reinit_rng));
                        ++result.rerandomized;
                    }
                }
            }
            return batch_loss;
        },
        [&](const LabeledSet &set) { return svb_accuracy(net, set); });
    result.model = std::move(net);
    return result;
}

double svb_accuracy(const SvbNet &net, const LabeledSet &set) {
    return classify_rows(set, [&](size_t k) { return svb_forward(net, set.x.row(k)); });
}

std::vector<ScalingRow> scaling_benchmark(const std::vector<size_t> &n_list, size_t epochs, size_t samples,
                                          uint64_t seed) {
    std::vector<ScalingRow> rows;
    for (size_t n : n_list) {
        if (n < 2) {
            throw std::invalid_argument("scaling_benchmark: n must be >= 2");
        }
        Rng rng(derive_seed(seed, {n}));
        LabeledSet data{Matrix(samples, n), std::vector<int>(samples)};
        for (size_t k = 0; k < samples; ++k) {
            auto row = data.x.row(k);
            double sq = 0.0;
            for (double &v : row) {
                v = rng.uniform(-1.0, 1.0);
                sq += v * v;
            }
            for (double &v : row) {
                v /= std::sqrt(sq);
            }
            data.y[k] = row[0] > 0.0 ? 1 : 0;
        }
        OrthoNet net = OrthoNet::random({n, n, 2}, seed);
        const size_t batch = 8;
        ScalingRow r;
        r.n = n;
        r.param_total = net.param_total();
        const auto t0 = std::chrono::steady_clock::now();
        for (size_t e = 0; e < epochs; ++e) {
            for (size_t start = 0; start < samples; start += batch) {
                std::vector<size_t> idx(std::min(batch, samples - start));
                std::iota(idx.begin(), idx.end(), start);
                const LabeledSet b = data.subset(idx);
                qpc_step(net, b.x, b.y, 0.05, &r.op_count);
            }
        }
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.sample_passes = static_cast<uint64_t>(epochs) * samples;
        rows.push_back(r);
    }
    return rows;
}

nlohmann::json orthonet_to_json(const OrthoNet &net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto &layer : net.layers) {
        layers.push_back(layer_to_json(layer));
    }
    return {{"sizes", net.sizes()}, {"layers", layers}};
}

OrthoNet orthonet_from_json(const nlohmann::json &j) {
    OrthoNet net;
    for (const auto &layer : j.at("layers")) {
        net.layers.push_back(layer_from_json(layer));
    }
    for (size_t l = 1; l < net.layers.size(); ++l) {
        if (net.layers[l].n_in() != net.layers[l - 1].n_out()) {
            throw std::invalid_argument("OrthoNet checkpoint: layer dimensions do not chain");
        }
    }
    return net;
}

}  // namespace uqnn
