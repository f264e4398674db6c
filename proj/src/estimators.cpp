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

#include "uqnn/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uqnn/rng.hpp"

namespace uqnn {

EstimatorMode EstimatorMode::sampled(uint64_t n_shots, uint64_t seed) {
    if (n_shots < 1) {
        throw std::invalid_argument("EstimatorMode: n_shots must be >= 1");
    }
    return {Kind::Sampled, n_shots, seed};
}

std::string EstimatorMode::describe() const {
    return is_exact() ? std::string("exact") : "sampled(" + std::to_string(n_shots) + ")";
}

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

void check_same_dim(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("inner product: dimension mismatch");
    }
    if (a.empty()) {
        throw std::invalid_argument("inner product: empty vectors");
    }
}

/// Loader registers need at least two wires; a scalar is padded with a zero.
std::vector<double> padded(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    if (out.size() == 1) {
        out.push_back(0.0);
    }
    return out;
}

/// The part of the signed circuit that depends on x only.
Circuit signed_prefix(const LoaderTopology &topology, const LoaderAngles &x_angles) {
    const size_t root = topology.root() + 1;
    Circuit c(topology.dim() + 1);
    c.add(Gate::x_init(kSignedIpAncilla));
    c.add(Gate::rbs(kSignedIpAncilla, root, kQuarterPi));
    c.append(build_loader(topology, x_angles), 1, /*skip_x=*/true);
    return c;
}

void finish_signed(Circuit &c, const LoaderTopology &topology, const LoaderAngles &w_angles) {
    c.append(adjoint_loader(topology, w_angles), 1);
    c.add(Gate::rbs(kSignedIpAncilla, topology.root() + 1, kQuarterPi));
}

/// Runs, samples and inverts the signed circuit for unit inputs.
IpEstimate sample_signed(const Circuit &circuit, const EstimatorMode &mode, uint64_t seed, double scale) {
    UnaryState state = run_circuit(circuit);
    OutcomeCounts kept = postselect_unary(sample_outcomes(state, mode.n_shots, seed));
    const double p_hat = std::clamp(
        static_cast<double>(kept.marginal_one(kSignedIpAncilla)) / static_cast<double>(kept.total_shots()), 0.0, 1.0);
    IpEstimate est;
    est.value = scale * (1.0 - 2.0 * std::sqrt(p_hat));
    est.mode = mode;
    est.shots_used = kept.total_shots();
    return est;
}

struct PreparedInput {
    std::vector<double> v;
    double norm = 0.0;
};

PreparedInput prepare_input(std::span<const double> x) {
    PreparedInput p{padded(x), 0.0};
    p.norm = norm2(p.v);
    return p;
}

}  // namespace

Circuit square_ip_circuit(std::span<const double> x_hat, std::span<const double> w_hat, LoaderKind kind) {
    check_same_dim(x_hat, w_hat);
    LoaderTopology topology(kind, x_hat.size());
    Circuit c = build_loader(topology, compute_angles(topology, x_hat));
    c.append(adjoint_loader(topology, compute_angles(topology, w_hat)));
    return c;
}

Circuit signed_ip_circuit(std::span<const double> x_hat, std::span<const double> w_hat, LoaderKind kind) {
    check_same_dim(x_hat, w_hat);
    LoaderTopology topology(kind, x_hat.size());
    Circuit c = signed_prefix(topology, compute_angles(topology, x_hat));
    finish_signed(c, topology, compute_angles(topology, w_hat));
    return c;
}

IpEstimate estimate_ip(std::span<const double> x, std::span<const double> w, const EstimatorMode &mode,
                       LoaderKind kind) {
    check_same_dim(x, w);
    if (mode.is_exact()) {
        return {dot(w, x), mode, 0};
    }
    PreparedInput px = prepare_input(x);
    PreparedInput pw = prepare_input(w);
    if (px.norm == 0.0 || pw.norm == 0.0) {
        return {0.0, mode, 0};
    }
    LoaderTopology topology(kind, px.v.size());
    Circuit c = signed_prefix(topology, compute_angles(topology, px.v));
    finish_signed(c, topology, compute_angles(topology, pw.v));
    return sample_signed(c, mode, mode.seed, px.norm * pw.norm);
}

uint64_t row_seed(uint64_t run_seed, uint64_t row, uint64_t call_counter) {
    return derive_seed(run_seed, {row, call_counter});
}

namespace {

template <class RowFn>
std::vector<double> matvec_impl(size_t n_rows, std::span<const double> x, const EstimatorMode &mode,
                                uint64_t call_counter, LoaderKind kind, RowFn row_of) {
    std::vector<double> out(n_rows);
    if (mode.is_exact()) {
        for (size_t j = 0; j < n_rows; ++j) {
            out[j] = dot(row_of(j), x);
        }
        return out;
    }
    PreparedInput px = prepare_input(x);
    if (px.norm == 0.0) {
        return out;
    }
    LoaderTopology topology(kind, px.v.size());
    const Circuit prefix = signed_prefix(topology, compute_angles(topology, px.v));
    for (size_t j = 0; j < n_rows; ++j) {
        PreparedInput pw = prepare_input(row_of(j));
        if (pw.norm == 0.0) {
            out[j] = 0.0;
            continue;
        }
        Circuit c = prefix;
        finish_signed(c, topology, compute_angles(topology, pw.v));
        out[j] = sample_signed(c, mode, row_seed(mode.seed, j, call_counter), px.norm * pw.norm).value;
    }
    return out;
}

}  // namespace

std::vector<double> estimate_matvec(const Matrix &w, std::span<const double> x, const EstimatorMode &mode,
                                    uint64_t call_counter, LoaderKind kind) {
    if (w.cols() != x.size()) {
        throw std::invalid_argument("estimate_matvec: column count does not match the vector");
    }
    return matvec_impl(w.rows(), x, mode, call_counter, kind, [&](size_t j) { return w.row(j); });
}

std::vector<double> estimate_matvec_transposed(const Matrix &w, std::span<const double> x,
                                               const EstimatorMode &mode, uint64_t call_counter,
                                               LoaderKind kind) {
    if (w.rows() != x.size()) {
        throw std::invalid_argument("estimate_matvec_transposed: row count does not match the vector");
    }
    std::vector<double> column(w.rows());
    return matvec_impl(w.cols(), x, mode, call_counter, kind, [&](size_t j) {
        for (size_t r = 0; r < w.rows(); ++r) {
            column[r] = w(r, j);
        }
        return std::span<const double>(column);
    });
}

uint64_t quantum_step_count(uint64_t n, uint64_t n_shots) {
    if (n < 2) {
        throw std::invalid_argument("quantum_step_count: n must be >= 2");
    }
    const uint64_t log_n = static_cast<uint64_t>(std::bit_width(n - 1));
    return n_shots * (2 * log_n - 1);
}

uint64_t classical_step_count(uint64_t n) { return n; }

double quantum_step_count_continuous(double n, uint64_t n_shots) {
    return static_cast<double>(n_shots) * (2.0 * std::log2(n) - 1.0);
}

uint64_t crossover_dimension(uint64_t n_shots) {
    // On (2^(k-1), 2^k] the quantum count is the constant n_shots (2k - 1).
    for (uint64_t k = 1; k < 63; ++k) {
        const uint64_t lo = (uint64_t{1} << (k - 1)) + 1;
        const uint64_t hi = uint64_t{1} << k;
        const uint64_t candidate = std::max({lo, n_shots * (2 * k - 1) + 1, uint64_t{2}});
        if (candidate <= hi) {
            return candidate;
        }
    }
    throw std::overflow_error("crossover_dimension: no crossover below 2^63");
}

double crossover_dimension_continuous(uint64_t n_shots) {
    auto gap = [&](double n) { return n - quantum_step_count_continuous(n, n_shots); };
    double lo = std::max(2.0, 2.0 * static_cast<double>(n_shots) / std::numbers::ln2);
    if (gap(lo) >= 0.0) {
        return lo;
    }
    double hi = 2.0 * lo;
    while (gap(hi) < 0.0) {
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace uqnn
