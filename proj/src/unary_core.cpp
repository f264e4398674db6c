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

#include "uqnn/unary_core.hpp"

#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>

#include "uqnn/rng.hpp"

namespace uqnn {

namespace {

void check_wire(size_t q, size_t n, const char *what) {
    if (q >= n) {
        std::ostringstream msg;
        msg << what << ": qubit " << q << " out of range for " << n << " qubits";
        throw std::out_of_range(msg.str());
    }
}

}  // namespace

double canonical_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("canonical_angle: non-finite angle");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(theta, two_pi);  // [-pi, pi]
    if (r <= -std::numbers::pi) {
        r += two_pi;
    }
    return r;
}

std::string_view gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::X:
            return "X";
        case GateKind::RBS:
            return "RBS";
        case GateKind::H:
            return "H";
        case GateKind::RY:
            return "RY";
        case GateKind::CZ:
            return "CZ";
        case GateKind::CNOT:
            return "CNOT";
    }
    return "?";
}

GateKind gate_kind_from_name(std::string_view name) {
    for (GateKind k : {GateKind::X, GateKind::RBS, GateKind::H, GateKind::RY, GateKind::CZ, GateKind::CNOT}) {
        if (gate_kind_name(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

void Circuit::add(const Gate &gate) {
    check_wire(gate.q0, n_qubits_, "Circuit::add");
    check_wire(gate.q1, n_qubits_, "Circuit::add");
    if (gate.two_qubit() && gate.q0 == gate.q1) {
        throw std::invalid_argument("Circuit::add: two-qubit gate on a single wire");
    }
    if (!std::isfinite(gate.theta)) {
        throw std::invalid_argument("Circuit::add: non-finite angle");
    }
    gates_.push_back(gate);
}

void Circuit::append(const Circuit &other, size_t wire_offset, bool skip_x) {
    for (Gate g : other.gates()) {
        if (skip_x && g.kind == GateKind::X) {
            continue;
        }
        g.q0 += wire_offset;
        g.q1 += wire_offset;
        add(g);
    }
}

size_t Circuit::depth() const {
    std::vector<size_t> last(n_qubits_, 0);
    size_t depth = 0;
    for (const Gate &g : gates_) {
        if (g.kind == GateKind::X) {
            continue;
        }
        size_t t = last[g.q0];
        if (g.two_qubit()) {
            t = std::max(t, last[g.q1]);
        }
        ++t;
        last[g.q0] = t;
        last[g.q1] = t;
        depth = std::max(depth, t);
    }
    return depth;
}

size_t Circuit::count(GateKind kind) const {
    return static_cast<size_t>(std::count_if(gates_.begin(), gates_.end(), [&](const Gate &g) { return g.kind == kind; }));
}

std::array<std::array<double, 4>, 4> rbs_matrix(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {{
        {1.0, 0.0, 0.0, 0.0},
        {0.0, c, s, 0.0},
        {0.0, -s, c, 0.0},
        {0.0, 0.0, 0.0, 1.0},
    }};
}

UnaryState UnaryState::basis(size_t n, size_t wire) {
    check_wire(wire, n, "UnaryState::basis");
    std::vector<double> amp(n, 0.0);
    amp[wire] = 1.0;
    return UnaryState(std::move(amp));
}

UnaryState UnaryState::from_amplitudes(std::vector<double> amp) {
    for (double v : amp) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("UnaryState: non-finite amplitude");
        }
    }
    double n = norm2(amp);
    if (std::abs(n - 1.0) > 1e-9) {
        throw std::invalid_argument("UnaryState: amplitudes are not unit norm");
    }
    return UnaryState(std::move(amp));
}

UnaryState apply_rbs(UnaryState state, size_t a, size_t b, double theta) {
    check_wire(a, state.n_qubits(), "apply_rbs");
    check_wire(b, state.n_qubits(), "apply_rbs");
    if (a == b) {
        throw std::invalid_argument("apply_rbs: a == b");
    }
    rotate_pair(state.amp_[a], state.amp_[b], std::cos(theta), std::sin(theta));
    return state;
}

UnaryState run_circuit(const Circuit &c) {
    std::vector<double> amp(c.n_qubits(), 0.0);
    bool excited = false;
    for (const Gate &g : c.gates()) {
        switch (g.kind) {
            case GateKind::X:
                if (excited) {
                    throw std::invalid_argument("run_circuit: second X would leave the weight-1 subspace");
                }
                amp[g.q0] = 1.0;
                excited = true;
                break;
            case GateKind::RBS:
                if (excited) {
                    rotate_pair(amp[g.q0], amp[g.q1], std::cos(g.theta), std::sin(g.theta));
                }
                break;
            default:
                throw std::invalid_argument("run_circuit: gate " + std::string(gate_kind_name(g.kind)) +
                                            " is not supported in unary simulation");
        }
    }
    if (!excited) {
        throw std::invalid_argument("run_circuit: circuit never leaves the vacuum");
    }
    return UnaryState(std::move(amp));
}

UnaryState run_circuit(const Circuit &c, UnaryState initial) {
    if (initial.n_qubits() != c.n_qubits()) {
        throw std::invalid_argument("run_circuit: register size mismatch");
    }
    for (const Gate &g : c.gates()) {
        if (g.kind != GateKind::RBS) {
            throw std::invalid_argument("run_circuit: only RBS gates may act on an excited register");
        }
        rotate_pair(initial.amp_[g.q0], initial.amp_[g.q1], std::cos(g.theta), std::sin(g.theta));
    }
    return initial;
}

namespace {

size_t hamming_weight(std::string_view bits) { return static_cast<size_t>(std::count(bits.begin(), bits.end(), '1')); }

void check_bitstring(std::string_view bits, size_t n) {
    if (bits.size() != n) {
        throw std::invalid_argument("OutcomeCounts: bitstring length mismatch");
    }
    for (char ch : bits) {
        if (ch != '0' && ch != '1') {
            throw std::invalid_argument("OutcomeCounts: bitstring must contain only '0' and '1'");
        }
    }
}

}  // namespace

std::string unary_bitstring(size_t n, size_t wire) {
    std::string s(n, '0');
    s.at(wire) = '1';
    return s;
}

void OutcomeCounts::add(std::string_view bitstring, uint64_t count) {
    check_bitstring(bitstring, n_);
    if (count == 0) {
        return;
    }
    if (hamming_weight(bitstring) == 1) {
        unary_[bitstring.find('1')] += count;
    } else {
        other_[std::string(bitstring)] += count;
    }
    total_ += count;
}

void OutcomeCounts::add_unary(size_t wire, uint64_t count) {
    check_wire(wire, n_, "OutcomeCounts::add_unary");
    unary_[wire] += count;
    total_ += count;
}

uint64_t OutcomeCounts::count(std::string_view bitstring) const {
    check_bitstring(bitstring, n_);
    if (hamming_weight(bitstring) == 1) {
        return unary_[bitstring.find('1')];
    }
    auto it = other_.find(std::string(bitstring));
    return it == other_.end() ? 0 : it->second;
}

uint64_t OutcomeCounts::marginal_one(size_t qubit) const {
    check_wire(qubit, n_, "OutcomeCounts::marginal_one");
    uint64_t n1 = unary_[qubit];
    for (const auto &[bits, c] : other_) {
        if (bits[qubit] == '1') {
            n1 += c;
        }
    }
    return n1;
}

std::map<std::string, uint64_t> OutcomeCounts::to_map() const {
    std::map<std::string, uint64_t> out = other_;
    for (size_t w = 0; w < n_; ++w) {
        if (unary_[w] != 0) {
            out[unary_bitstring(n_, w)] = unary_[w];
        }
    }
    return out;
}

std::vector<uint64_t> sample_categorical(std::span<const double> probs, uint64_t shots, uint64_t seed) {
    const size_t k = probs.size();
    std::vector<uint64_t> counts(k, 0);
    if (k == 0 || shots == 0) {
        return counts;
    }
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("sample_categorical: probabilities must be finite and non-negative");
        }
        total += p;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("sample_categorical: probabilities sum to zero");
    }
    Rng rng(seed);
    if (shots >= 32 * k) {
        // Conditional binomials: O(k) regardless of the shot count.
        uint64_t remaining = shots;
        double mass = total;
        std::mt19937_64 engine(rng.next());
        for (size_t i = 0; i + 1 < k && remaining > 0; ++i) {
            double p = mass > 0.0 ? std::clamp(probs[i] / mass, 0.0, 1.0) : 0.0;
            std::binomial_distribution<uint64_t> draw(remaining, p);
            uint64_t c = p >= 1.0 ? remaining : draw(engine);
            counts[i] = c;
            remaining -= c;
            mass -= probs[i];
        }
        counts[k - 1] += remaining;
        return counts;
    }
    // Sorted uniforms merged against the running CDF.
    std::vector<double> u(shots);
    for (auto &v : u) {
        v = rng.uniform() * total;
    }
    std::sort(u.begin(), u.end());
    size_t i = 0;
    double cdf = probs[0];
    for (double v : u) {
        while (v >= cdf && i + 1 < k) {
            ++i;
            cdf += probs[i];
        }
        ++counts[i];
    }
    return counts;
}

OutcomeCounts sample_outcomes(const UnaryState &state, uint64_t n_shots, uint64_t seed) {
    if (n_shots < 1) {
        throw std::invalid_argument("sample_outcomes: n_shots must be >= 1");
    }
    std::vector<double> probs(state.n_qubits());
    for (size_t i = 0; i < probs.size(); ++i) {
        probs[i] = state[i] * state[i];
    }
    auto draws = sample_categorical(probs, n_shots, seed);
    OutcomeCounts counts(state.n_qubits());
    for (size_t i = 0; i < draws.size(); ++i) {
        if (draws[i] != 0) {
            counts.add_unary(i, draws[i]);
        }
    }
    return counts;
}

OutcomeCounts postselect_unary(const OutcomeCounts &counts) {
    OutcomeCounts kept(counts.n_qubits());
    for (size_t w = 0; w < counts.n_qubits(); ++w) {
        if (counts.unary_count(w) != 0) {
            kept.add_unary(w, counts.unary_count(w));
        }
    }
    if (kept.total_shots() == 0) {
        throw EmptyPostselection();
    }
    return kept;
}

OutcomeCounts postselect_unary(const OutcomeCounts &counts, size_t first, size_t width) {
    if (first + width > counts.n_qubits()) {
        throw std::out_of_range("postselect_unary: register exceeds the measured wires");
    }
    OutcomeCounts kept(counts.n_qubits());
    for (const auto &[bits, c] : counts.to_map()) {
        if (hamming_weight(std::string_view(bits).substr(first, width)) == 1) {
            kept.add(bits, c);
        }
    }
    if (kept.total_shots() == 0) {
        throw EmptyPostselection();
    }
    return kept;
}

Circuit decompose_rbs(double theta, size_t a, size_t b, size_t n_qubits) {
    Circuit c(n_qubits);
    c.add(Gate::h(a));
    c.add(Gate::h(b));
    c.add(Gate::cz(a, b));
    c.add(Gate::ry(a, theta));
    c.add(Gate::ry(b, -theta));
    c.add(Gate::cz(a, b));
    c.add(Gate::h(a));
    c.add(Gate::h(b));
    return c;
}

DenseState DenseState::zero(size_t n) { return basis(n, 0); }

DenseState DenseState::basis(size_t n, size_t index) {
    if (n > kMaxDenseQubits) {
        throw std::invalid_argument("DenseState: too many qubits for the dense oracle");
    }
    DenseState s{n, std::vector<double>(size_t{1} << n, 0.0)};
    s.amp.at(index) = 1.0;
    return s;
}

DenseState dense_simulate(const Circuit &c) { return dense_simulate(c, DenseState::zero(c.n_qubits())); }

DenseState dense_simulate(const Circuit &c, DenseState state) {
    const size_t n = c.n_qubits();
    if (n > kMaxDenseQubits) {
        throw std::invalid_argument("dense_simulate: too many qubits for the dense oracle");
    }
    if (state.n != n) {
        throw std::invalid_argument("dense_simulate: register size mismatch");
    }
    const size_t dim = size_t{1} << n;
    auto mask = [n](size_t q) { return size_t{1} << (n - 1 - q); };
    auto &amp = state.amp;
    for (const Gate &g : c.gates()) {
        const size_t m0 = mask(g.q0);
        const size_t m1 = mask(g.q1);
        switch (g.kind) {
            case GateKind::X:
                for (size_t i = 0; i < dim; ++i) {
                    if (!(i & m0)) {
                        std::swap(amp[i], amp[i | m0]);
                    }
                }
                break;
            case GateKind::H: {
                const double r = std::numbers::sqrt2 / 2.0;
                for (size_t i = 0; i < dim; ++i) {
                    if (!(i & m0)) {
                        double a0 = amp[i];
                        double a1 = amp[i | m0];
                        amp[i] = r * (a0 + a1);
                        amp[i | m0] = r * (a0 - a1);
                    }
                }
                break;
            }
            case GateKind::RY: {
                const double ch = std::cos(g.theta / 2.0);
                const double sh = std::sin(g.theta / 2.0);
                for (size_t i = 0; i < dim; ++i) {
                    if (!(i & m0)) {
                        rotate_pair(amp[i], amp[i | m0], ch, sh);
                    }
                }
                break;
            }
            case GateKind::CZ:
                for (size_t i = 0; i < dim; ++i) {
                    if ((i & m0) && (i & m1)) {
                        amp[i] = -amp[i];
                    }
                }
                break;
            case GateKind::CNOT:
                for (size_t i = 0; i < dim; ++i) {
                    if ((i & m0) && !(i & m1)) {
                        std::swap(amp[i], amp[i | m1]);
                    }
                }
                break;
            case GateKind::RBS: {
                const double cs = std::cos(g.theta);
                const double sn = std::sin(g.theta);
                for (size_t i = 0; i < dim; ++i) {
                    // i runs over states with q0 = 1, q1 = 0 (the |10> role).
                    if ((i & m0) && !(i & m1)) {
                        const size_t j = (i & ~m0) | m1;
                        rotate_pair(amp[i], amp[j], cs, sn);
                    }
                }
                break;
            }
        }
    }
    return state;
}

std::vector<double> project_unary(const DenseState &state) {
    std::vector<double> out(state.n);
    for (size_t w = 0; w < state.n; ++w) {
        out[w] = state.amp[unary_index(state.n, w)];
    }
    return out;
}

Matrix dense_unitary(const Circuit &c) {
    const size_t n = c.n_qubits();
    if (n > 10) {
        throw std::invalid_argument("dense_unitary: register too large");
    }
    const size_t dim = size_t{1} << n;
    Matrix u(dim, dim);
    for (size_t j = 0; j < dim; ++j) {
        DenseState s = dense_simulate(c, DenseState::basis(n, j));
        for (size_t i = 0; i < dim; ++i) {
            u(i, j) = s.amp[i];
        }
    }
    return u;
}

}  // namespace uqnn
