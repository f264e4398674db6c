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
 * Orthogonal layers realized as (truncated) pyramids of nearest-neighbour
 * RBS gates.
 *
 * Gate (i, m) rotates wires (i, i + 1) for level m < n_out and
 * m <= i <= n_in - 2, at timestep n_in - 1 - i + 2m. Level m is a chain that
 * runs from the bottom wire up to wire m, so the outputs are wires
 * 0..n_out-1. On the working vector each gate acts as
 *
 *     (v_i, v_{i+1}) <- [[c, s], [-s, c]] (v_i, v_{i+1}),
 *
 * which is apply_rbs(i + 1, i, theta).
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uqnn/estimators.hpp"
#include "uqnn/linalg.hpp"
#include "uqnn/unary_core.hpp"

namespace uqnn {

struct PyramidGate {
    size_t wire;      ///< rotates wires (wire, wire + 1)
    size_t level;
    size_t timestep;  ///< 1-based parallel layer

    bool operator==(const PyramidGate &) const = default;
};

/// (2 n_in - 1 - n_out) n_out / 2. Throws unless 1 <= n_out <= n_in.
size_t param_count(size_t n_in, size_t n_out);

/// Gates in application order (by timestep, then by wire).
std::vector<PyramidGate> pyramid_plan(size_t n_in, size_t n_out);

/// The 2x2 block of one gate applied in place to (v[wire], v[wire + 1]).
inline void pyramid_rotate(double &lo, double &hi, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double nlo = c * lo + s * hi;
    const double nhi = -s * lo + c * hi;
    lo = nlo;
    hi = nhi;
}

class PyramidLayer {
  public:
    /// theta.size() must equal param_count; row_signs empty means all +1.
    PyramidLayer(size_t n_in, size_t n_out, std::vector<double> theta, std::vector<int> row_signs = {});

    static PyramidLayer zeros(size_t n_in, size_t n_out);

    size_t n_in() const { return n_in_; }
    size_t n_out() const { return n_out_; }
    const std::vector<double> &theta() const { return theta_; }
    std::vector<double> &theta() { return theta_; }
    const std::vector<int> &row_signs() const { return row_signs_; }
    /// Entry k of plan() uses theta()[k].
    const std::vector<PyramidGate> &plan() const { return plan_; }

    /// The gates as RBS on n_in wires, shifted by `wire_offset`.
    Circuit circuit(size_t wire_offset = 0, size_t n_qubits = 0) const;

    bool operator==(const PyramidLayer &) const = default;

  private:
    size_t n_in_;
    size_t n_out_;
    std::vector<double> theta_;
    std::vector<int> row_signs_;
    std::vector<PyramidGate> plan_;
};

/// n_out x n_in matrix with orthonormal rows.
Matrix angles_to_matrix(const PyramidLayer &layer);

/// Full n_in x n_in orthogonal matrix; the first n_out rows carry row_signs.
Matrix full_unitary(const PyramidLayer &layer);

/// Inverse of angles_to_matrix for matrices with orthonormal rows. Interior
/// chain angles land in [0, pi], the last angle of each chain in (-pi, pi].
/// For square input the leftover +-1 of the final row becomes its row sign.
/// Throws std::invalid_argument if rows are not orthonormal to 1e-8.
PyramidLayer matrix_to_angles(const Matrix &w);

/// Gate-by-gate application to a copy of x; returns the n_out outputs with
/// row signs. Adds one per 2x2 rotation to *rotations when given.
std::vector<double> forward(const PyramidLayer &layer, std::span<const double> x, uint64_t *rotations = nullptr);

/// As forward but keeps all n_in wires (signs on the first n_out).
std::vector<double> forward_full(const PyramidLayer &layer, std::span<const double> x);

/// Outcome probabilities of the sign-recovery circuit for unit x:
/// p[b * n_in + j] = (1/4)((U x)_j + (-1)^b / sqrt(n_in))^2 over every wire j.
std::vector<double> inference_distribution(const PyramidLayer &layer, std::span<const double> x_hat);

/// The same circuit gate by gate on n_in + 1 wires (control = wire 0,
/// register = wires 1..n_in) for dense simulation.
Circuit sign_recovery_circuit(const PyramidLayer &layer, std::span<const double> x_hat);

/// Exact: forward(). Sampled: sample the sign-recovery outcomes, keep strings
/// with one excited register wire and return
/// sqrt(n_in) (P0_j - P1_j) |x| for j < n_out. Zero x gives zeros.
std::vector<double> estimate_layer_output(const PyramidLayer &layer, std::span<const double> x,
                                          const EstimatorMode &mode);

nlohmann::json layer_to_json(const PyramidLayer &layer);
PyramidLayer layer_from_json(const nlohmann::json &j);

}  // namespace uqnn
