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
 * Simulation of RBS circuits restricted to the Hamming-weight-1 subspace,
 * shot sampling, unary post-selection, and a dense 2^n state-vector oracle.
 *
 * Wire convention: qubit q is character q of a measured bitstring and bit
 * (n - 1 - q) of a dense state index, so e_1 (wire 0 excited) reads "10...0".
 * In apply_rbs(a, b, theta) wire a carries the |10> role of the RBS matrix
 * and wire b the |01> role, which gives
 *
 *     a' = cos(theta) a - sin(theta) b
 *     b' = sin(theta) a + cos(theta) b.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uqnn/linalg.hpp"

namespace uqnn {

/// Maps an angle into (-pi, pi].
double canonical_angle(double theta);

enum class GateKind {
    X,     ///< Pauli X. In unary simulation only valid as the excitation of the vacuum.
    RBS,   ///< Reconfigurable beam splitter on (q0, q1).
    H,     ///< Hadamard (dense oracle only).
    RY,    ///< Y rotation exp(-i theta Y / 2) (dense oracle only).
    CZ,    ///< Controlled Z (dense oracle only).
    CNOT,  ///< Controlled X, q0 controls q1 (dense oracle only).
};

std::string_view gate_kind_name(GateKind kind);
GateKind gate_kind_from_name(std::string_view name);

struct Gate {
    GateKind kind = GateKind::X;
    size_t q0 = 0;
    size_t q1 = 0;
    double theta = 0.0;

    static Gate x_init(size_t q) { return {GateKind::X, q, q, 0.0}; }
    static Gate rbs(size_t a, size_t b, double theta) { return {GateKind::RBS, a, b, theta}; }
    static Gate h(size_t q) { return {GateKind::H, q, q, 0.0}; }
    static Gate ry(size_t q, double theta) { return {GateKind::RY, q, q, theta}; }
    static Gate cz(size_t a, size_t b) { return {GateKind::CZ, a, b, 0.0}; }
    static Gate cnot(size_t control, size_t target) { return {GateKind::CNOT, control, target, 0.0}; }

    bool two_qubit() const { return kind == GateKind::RBS || kind == GateKind::CZ || kind == GateKind::CNOT; }

    bool operator==(const Gate &) const = default;
};

/// Ordered gate list on a fixed register.
class Circuit {
  public:
    explicit Circuit(size_t n_qubits) : n_qubits_(n_qubits) {}

    size_t n_qubits() const { return n_qubits_; }
    const std::vector<Gate> &gates() const { return gates_; }
    size_t size() const { return gates_.size(); }

    /// Validates indices: every qubit < n_qubits, two-qubit gates on distinct wires.
    void add(const Gate &gate);

    /// Appends `other` with its wires shifted by `wire_offset`.
    void append(const Circuit &other, size_t wire_offset = 0, bool skip_x = false);

    /// Number of parallel timesteps under greedy (as-soon-as-possible) layering.
    /// X initializations are state preparation and do not occupy a timestep.
    size_t depth() const;

    size_t count(GateKind kind) const;

    bool operator==(const Circuit &) const = default;

  private:
    size_t n_qubits_;
    std::vector<Gate> gates_;
};

/// The RBS(theta) matrix in basis order |00>, |01>, |10>, |11>.
std::array<std::array<double, 4>, 4> rbs_matrix(double theta);

/// Amplitudes over the weight-1 basis; amp[i] is the amplitude of e_{i+1}.
class UnaryState {
  public:
    static UnaryState basis(size_t n, size_t wire);
    /// Requires unit norm within 1e-9.
    static UnaryState from_amplitudes(std::vector<double> amp);

    size_t n_qubits() const { return amp_.size(); }
    std::span<const double> amplitudes() const { return amp_; }
    double operator[](size_t i) const { return amp_[i]; }
    double norm() const { return norm2(amp_); }

  private:
    explicit UnaryState(std::vector<double> amp) : amp_(std::move(amp)) {}
    std::vector<double> amp_;

    friend UnaryState apply_rbs(UnaryState state, size_t a, size_t b, double theta);
    friend UnaryState run_circuit(const Circuit &c, UnaryState initial);
    friend UnaryState run_circuit(const Circuit &c);
};

/// The in-place 2x2 rotation used by every unary kernel.
inline void rotate_pair(double &a, double &b, double c, double s) {
    const double na = c * a - s * b;
    const double nb = s * a + c * b;
    a = na;
    b = nb;
}

UnaryState apply_rbs(UnaryState state, size_t a, size_t b, double theta);

/// Runs from the vacuum. The circuit must excite exactly one wire with X
/// before the end; a second X would leave the weight-1 subspace and is
/// rejected, as are dense-only gates.
UnaryState run_circuit(const Circuit &c);

/// Runs from a given unary state; X gates are rejected.
UnaryState run_circuit(const Circuit &c, UnaryState initial);

/// Measurement counts keyed by bitstring. Weight-1 outcomes are stored
/// densely; anything else sparsely.
class OutcomeCounts {
  public:
    explicit OutcomeCounts(size_t n_qubits) : n_(n_qubits), unary_(n_qubits, 0) {}

    size_t n_qubits() const { return n_; }
    uint64_t total_shots() const { return total_; }

    void add(std::string_view bitstring, uint64_t count);
    void add_unary(size_t wire, uint64_t count);

    uint64_t count(std::string_view bitstring) const;
    uint64_t unary_count(size_t wire) const { return unary_.at(wire); }

    /// N_1: shots whose measurement of `qubit` gave 1.
    uint64_t marginal_one(size_t qubit) const;

    std::map<std::string, uint64_t> to_map() const;
    const std::map<std::string, uint64_t> &non_unary() const { return other_; }

    bool operator==(const OutcomeCounts &) const = default;

  private:
    size_t n_;
    std::vector<uint64_t> unary_;
    std::map<std::string, uint64_t> other_;
    uint64_t total_ = 0;
};

std::string unary_bitstring(size_t n, size_t wire);

/// Multinomial draw of `shots` outcomes from `probs` (need not be exactly normalized).
std::vector<uint64_t> sample_categorical(std::span<const double> probs, uint64_t shots, uint64_t seed);

/// Measures every wire `n_shots` times; deterministic given `seed`.
OutcomeCounts sample_outcomes(const UnaryState &state, uint64_t n_shots, uint64_t seed);

class EmptyPostselection : public std::runtime_error {
  public:
    EmptyPostselection() : std::runtime_error("post-selection discarded every shot") {}
};

/// Keeps only bitstrings of Hamming weight 1. Throws EmptyPostselection when
/// nothing survives.
OutcomeCounts postselect_unary(const OutcomeCounts &counts);

/// Keeps bitstrings whose restriction to wires [first, first + width) has
/// weight 1; other wires are unconstrained.
OutcomeCounts postselect_unary(const OutcomeCounts &counts, size_t first, size_t width);

/// RBS(theta) on wires (a, b) over the gate set {H, RY, CZ}: two CZ gates.
Circuit decompose_rbs(double theta, size_t a = 0, size_t b = 1, size_t n_qubits = 2);

constexpr size_t kMaxDenseQubits = 14;

struct DenseState {
    size_t n = 0;
    std::vector<double> amp;

    static DenseState zero(size_t n);
    static DenseState basis(size_t n, size_t index);
    double norm() const { return norm2(amp); }
};

/// Index of the dense basis state with only `wire` excited.
inline size_t unary_index(size_t n, size_t wire) { return size_t{1} << (n - 1 - wire); }

DenseState dense_simulate(const Circuit &c);
DenseState dense_simulate(const Circuit &c, DenseState initial);

/// Amplitudes of the n weight-1 basis states, ordered by wire.
std::vector<double> project_unary(const DenseState &state);

/// Full 2^n x 2^n real matrix of a circuit (column j = image of basis j).
Matrix dense_unitary(const Circuit &c);

}  // namespace uqnn
