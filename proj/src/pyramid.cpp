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

#include "uqnn/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uqnn/loaders.hpp"

namespace uqnn {

size_t param_count(size_t n_in, size_t n_out) {
    if (n_out < 1 || n_out > n_in) {
        throw std::invalid_argument("pyramid: need 1 <= n_out <= n_in, got n_in=" + std::to_string(n_in) +
                                    " n_out=" + std::to_string(n_out));
    }
    return (2 * n_in - 1 - n_out) * n_out / 2;
}

std::vector<PyramidGate> pyramid_plan(size_t n_in, size_t n_out) {
    param_count(n_in, n_out);
    std::vector<PyramidGate> plan;
    for (size_t m = 0; m < n_out; ++m) {
        for (size_t i = m; i + 2 <= n_in; ++i) {
            plan.push_back({i, m, n_in - 1 - i + 2 * m});
        }
    }
    std::sort(plan.begin(), plan.end(), [](const PyramidGate &a, const PyramidGate &b) {
        return a.timestep != b.timestep ? a.timestep < b.timestep : a.wire < b.wire;
    });
    return plan;
}

PyramidLayer::PyramidLayer(size_t n_in, size_t n_out, std::vector<double> theta, std::vector<int> row_signs)
    : n_in_(n_in), n_out_(n_out), theta_(std::move(theta)), row_signs_(std::move(row_signs)) {
    const size_t expected = param_count(n_in, n_out);
    if (theta_.size() != expected) {
        throw std::invalid_argument("PyramidLayer: expected " + std::to_string(expected) + " angles, got " +
                                    std::to_string(theta_.size()));
    }
    for (double t : theta_) {
        if (!std::isfinite(t)) {
            throw std::invalid_argument("PyramidLayer: non-finite angle");
        }
    }
    if (row_signs_.empty()) {
        row_signs_.assign(n_out, 1);
    }
    if (row_signs_.size() != n_out) {
        throw std::invalid_argument("PyramidLayer: row_signs must have n_out entries");
    }
    for (int s : row_signs_) {
        if (s != 1 && s != -1) {
            throw std::invalid_argument("PyramidLayer: row signs must be +1 or -1");
        }
    }
    plan_ = pyramid_plan(n_in, n_out);
}

PyramidLayer PyramidLayer::zeros(size_t n_in, size_t n_out) {
    return PyramidLayer(n_in, n_out, std::vector<double>(param_count(n_in, n_out), 0.0));
}

Circuit PyramidLayer::circuit(size_t wire_offset, size_t n_qubits) const {
    Circuit c(std::max(n_qubits, n_in_ + wire_offset));
    for (size_t k = 0; k < plan_.size(); ++k) {
        const size_t i = plan_[k].wire + wire_offset;
        c.add(Gate::rbs(i + 1, i, theta_[k]));
    }
    return c;
}

std::vector<double> forward_full(const PyramidLayer &layer, std::span<const double> x) {
    if (x.size() != layer.n_in()) {
        throw std::invalid_argument("pyramid forward: input has dimension " + std::to_string(x.size()) +
                                    ", layer expects " + std::to_string(layer.n_in()));
    }
    std::vector<double> v(x.begin(), x.end());
    const auto &plan = layer.plan();
    const auto &theta = layer.theta();
    for (size_t k = 0; k < plan.size(); ++k) {
        pyramid_rotate(v[plan[k].wire], v[plan[k].wire + 1], theta[k]);
    }
    for (size_t j = 0; j < layer.n_out(); ++j) {
        v[j] *= layer.row_signs()[j];
    }
    return v;
}

std::vector<double> forward(const PyramidLayer &layer, std::span<const double> x, uint64_t *rotations) {
    std::vector<double> v = forward_full(layer, x);
    v.resize(layer.n_out());
    if (rotations != nullptr) {
        *rotations += layer.plan().size();
    }
    return v;
}

Matrix full_unitary(const PyramidLayer &layer) {
    const size_t n = layer.n_in();
    Matrix u(n, n);
    std::vector<double> e(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        std::vector<double> col = forward_full(layer, e);
        for (size_t r = 0; r < n; ++r) {
            u(r, j) = col[r];
        }
        e[j] = 0.0;
    }
    return u;
}

Matrix angles_to_matrix(const PyramidLayer &layer) {
    Matrix u = full_unitary(layer);
    Matrix w(layer.n_out(), layer.n_in());
    for (size_t r = 0; r < layer.n_out(); ++r) {
        for (size_t c = 0; c < layer.n_in(); ++c) {
            w(r, c) = u(r, c);
        }
    }
    return w;
}

PyramidLayer matrix_to_angles(const Matrix &w) {
    const size_t n_out = w.rows();
    const size_t n = w.cols();
    param_count(n, n_out);
    for (size_t a = 0; a < n_out; ++a) {
        for (size_t b = 0; b < n_out; ++b) {
            const double g = dot(w.row(a), w.row(b));
            if (std::abs(g - (a == b ? 1.0 : 0.0)) > 1e-8) {
                throw std::invalid_argument("matrix_to_angles: rows are not orthonormal");
            }
        }
    }

    // Level m owns row m: its chain is the hyperspherical parametrization of
    // that row. Multiplying every row by the chain's inverse clears it to e_m
    // and leaves the remaining levels on wires m + 1.. .
    const std::vector<PyramidGate> plan = pyramid_plan(n, n_out);
    std::vector<size_t> slot(n * n_out);
    for (size_t k = 0; k < plan.size(); ++k) {
        slot[plan[k].level * n + plan[k].wire] = k;
    }
    std::vector<double> theta(plan.size(), 0.0);
    std::vector<int> signs(n_out, 1);
    Matrix m = w;

    for (size_t level = 0; level < n_out; ++level) {
        auto v = m.row(level);
        if (level + 1 == n) {
            signs[level] = v[n - 1] < 0.0 ? -1 : 1;
            break;
        }
        std::vector<double> tail(n + 1, 0.0);
        for (size_t i = n; i-- > level;) {
            tail[i] = std::hypot(tail[i + 1], v[i]);
        }
        for (size_t i = level; i + 2 < n; ++i) {
            theta[slot[level * n + i]] = std::atan2(tail[i + 1], v[i]);
        }
        theta[slot[level * n + n - 2]] = canonical_angle(std::atan2(v[n - 1], v[n - 2]));

        for (size_t r = level; r < n_out; ++r) {
            auto row = m.row(r);
            for (size_t i = n - 1; i-- > level;) {
                pyramid_rotate(row[i], row[i + 1], theta[slot[level * n + i]]);
            }
        }
    }
    return PyramidLayer(n, n_out, std::move(theta), std::move(signs));
}

std::vector<double> inference_distribution(const PyramidLayer &layer, std::span<const double> x_hat) {
    const double norm = norm2(x_hat);
    if (std::abs(norm - 1.0) > 1e-9) {
        throw std::invalid_argument("inference_distribution: input must have unit norm");
    }
    const size_t n = layer.n_in();
    const std::vector<double> y = forward_full(layer, x_hat);
    const double u = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> p(2 * n);
    for (size_t j = 0; j < n; ++j) {
        p[j] = 0.25 * (y[j] + u) * (y[j] + u);
        p[n + j] = 0.25 * (y[j] - u) * (y[j] - u);
    }
    return p;
}

Circuit sign_recovery_circuit(const PyramidLayer &layer, std::span<const double> x_hat) {
    const size_t n = layer.n_in();
    if (n < 2) {
        throw std::invalid_argument("sign_recovery_circuit: needs at least two register wires");
    }
    LoaderTopology topology(LoaderKind::SemiDiagonal, n);
    const std::vector<double> uniform(n, 1.0 / std::sqrt(static_cast<double>(n)));
    const LoaderAngles x_angles = compute_angles(topology, x_hat);
    const LoaderAngles u_angles = compute_angles(topology, uniform);
    const size_t control = 0;
    const size_t root = topology.root() + 1;

    // A negative row sign is not an RBS gate.
    for (int s : layer.row_signs()) {
        if (s != 1) {
            throw std::invalid_argument("sign_recovery_circuit: row signs must all be +1");
        }
    }

    Circuit c(n + 1);
    c.add(Gate::h(control));
    c.add(Gate::cnot(control, root));
    c.append(build_loader(topology, x_angles), 1, /*skip_x=*/true);
    c.append(layer.circuit(1, n + 1));
    c.append(adjoint_loader(topology, u_angles), 1);
    c.add(Gate::x_init(control));
    c.add(Gate::cnot(control, root));
    c.append(build_loader(topology, u_angles), 1, /*skip_x=*/true);
    c.add(Gate::h(control));
    return c;
}

std::vector<double> estimate_layer_output(const PyramidLayer &layer, std::span<const double> x,
                                          const EstimatorMode &mode) {
    if (mode.is_exact()) {
        return forward(layer, x);
    }
    if (x.size() != layer.n_in()) {
        throw std::invalid_argument("estimate_layer_output: dimension mismatch");
    }
    const size_t n = layer.n_in();
    std::vector<double> out(layer.n_out(), 0.0);
    const double norm = norm2(x);
    if (norm == 0.0) {
        return out;
    }
    std::vector<double> x_hat(x.begin(), x.end());
    for (double &v : x_hat) {
        v /= norm;
    }
    const std::vector<double> p = inference_distribution(layer, x_hat);
    const std::vector<uint64_t> drawn = sample_categorical(p, mode.n_shots, mode.seed);

    OutcomeCounts counts(n + 1);
    for (size_t b = 0; b < 2; ++b) {
        for (size_t j = 0; j < n; ++j) {
            if (drawn[b * n + j] == 0) {
                continue;
            }
            std::string bits(n + 1, '0');
            bits[0] = b == 0 ? '0' : '1';
            bits[j + 1] = '1';
            counts.add(bits, drawn[b * n + j]);
        }
    }
    const OutcomeCounts kept = postselect_unary(counts, 1, n);
    const double total = static_cast<double>(kept.total_shots());
    const double scale = std::sqrt(static_cast<double>(n)) * norm;
    for (size_t j = 0; j < layer.n_out(); ++j) {
        std::string zero(n + 1, '0');
        zero[j + 1] = '1';
        std::string one = zero;
        one[0] = '1';
        const double diff =
            (static_cast<double>(kept.count(zero)) - static_cast<double>(kept.count(one))) / total;
        out[j] = scale * diff;
    }
    return out;
}

nlohmann::json layer_to_json(const PyramidLayer &layer) {
    return {{"n_in", layer.n_in()},
            {"n_out", layer.n_out()},
            {"theta", layer.theta()},
            {"row_signs", layer.row_signs()}};
}

PyramidLayer layer_from_json(const nlohmann::json &j) {
    return PyramidLayer(j.at("n_in").get<size_t>(), j.at("n_out").get<size_t>(),
                        j.at("theta").get<std::vector<double>>(), j.value("row_signs", std::vector<int>{}));
}

}  // namespace uqnn
