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
 * Inner-product estimation circuits and the matvec service built on them.
 *
 * The signed circuit runs on d + 1 wires: wire 0 is the ancilla, wires
 * 1..d hold the loader pair. With the ancilla excited, an RBS(pi/4) between
 * the ancilla and the loader root, the loader for x, the adjoint loader for
 * w, and a closing RBS(pi/4), the ancilla amplitude is (1 - w.x) / 2 for unit
 * x and w. Since that is never negative, sqrt(Pr[ancilla = 1]) recovers the
 * signed inner product.
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uqnn/linalg.hpp"
#include "uqnn/loaders.hpp"
#include "uqnn/unary_core.hpp"

namespace uqnn {

constexpr uint64_t kDefaultShots = 400;

struct EstimatorMode {
    enum class Kind { Exact, Sampled };

    Kind kind = Kind::Exact;
    uint64_t n_shots = kDefaultShots;
    uint64_t seed = 0;

    static EstimatorMode exact() { return {}; }
    static EstimatorMode sampled(uint64_t n_shots = kDefaultShots, uint64_t seed = 0);

    bool is_exact() const { return kind == Kind::Exact; }
    std::string describe() const;

    bool operator==(const EstimatorMode &) const = default;
};

struct IpEstimate {
    double value = 0.0;
    EstimatorMode mode;
    uint64_t shots_used = 0;
};

/// Loader for x_hat then adjoint loader for w_hat on d wires; the root
/// amplitude of the final state is w_hat . x_hat.
Circuit square_ip_circuit(std::span<const double> x_hat, std::span<const double> w_hat,
                          LoaderKind kind = LoaderKind::SemiDiagonal);

/// The d + 1 wire signed circuit described above. The designated outcome is
/// the ancilla (wire 0) measured as 1.
Circuit signed_ip_circuit(std::span<const double> x_hat, std::span<const double> w_hat,
                          LoaderKind kind = LoaderKind::SemiDiagonal);

constexpr size_t kSignedIpAncilla = 0;

/// Estimate of w . x. Norms are tracked classically; a zero vector returns 0
/// without running a circuit. Exact mode returns the closed form sum w_i x_i.
/// Sampled mode runs the signed circuit on the normalized inputs with
/// mode.seed, post-selects unary outcomes and inverts
/// value = |x| |w| (1 - 2 sqrt(p_hat)).
IpEstimate estimate_ip(std::span<const double> x, std::span<const double> w, const EstimatorMode &mode,
                       LoaderKind kind = LoaderKind::SemiDiagonal);

/// Per-row stream seed. `call_counter` is supplied by the caller so rows are
/// reproducible regardless of evaluation order.
uint64_t row_seed(uint64_t run_seed, uint64_t row, uint64_t call_counter);

/// (estimate_ip(x, W.row(j)))_j.
std::vector<double> estimate_matvec(const Matrix &w, std::span<const double> x, const EstimatorMode &mode,
                                    uint64_t call_counter = 0, LoaderKind kind = LoaderKind::SemiDiagonal);

/// (estimate_ip(x, W.column(j)))_j, i.e. W^T x without forming the transpose.
std::vector<double> estimate_matvec_transposed(const Matrix &w, std::span<const double> x,
                                               const EstimatorMode &mode, uint64_t call_counter = 0,
                                               LoaderKind kind = LoaderKind::SemiDiagonal);

/// Shots times the parallel-loader circuit depth 2 ceil(log2 n) - 1.
uint64_t quantum_step_count(uint64_t n, uint64_t n_shots = kDefaultShots);
uint64_t classical_step_count(uint64_t n);
/// Same with the unrounded log2 n.
double quantum_step_count_continuous(double n, uint64_t n_shots = kDefaultShots);

/// Smallest n >= 2 with quantum_step_count(n) < n.
uint64_t crossover_dimension(uint64_t n_shots = kDefaultShots);
/// Root of n_shots (2 log2 n - 1) = n above the trivial region, by bisection.
double crossover_dimension_continuous(uint64_t n_shots = kDefaultShots);

}  // namespace uqnn
