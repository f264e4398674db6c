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
 * Orthogonal networks: stacked pyramid layers with sigmoids, trained by
 * gradient descent directly on the gate angles (QPC), and the classical
 * singular-value-bounded baseline (SVB) on explicit weight matrices.
 *
 * Each pyramid layer sees its input normalized to unit length and rescales
 * the output by the input norm. Layers carry no biases.
 */

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "uqnn/estimators.hpp"
#include "uqnn/labeled.hpp"
#include "uqnn/linalg.hpp"
#include "uqnn/pyramid.hpp"
#include "uqnn/qnn.hpp"

namespace uqnn {

struct OrthoNet {
    std::vector<PyramidLayer> layers;

    /// Angles uniform in [-pi/4, pi/4].
    static OrthoNet random(const std::vector<size_t> &sizes, uint64_t seed);

    std::vector<size_t> sizes() const;
    size_t param_total() const;
};

/// Pre-gate wire pairs of one layer, in plan order, plus the input norm.
struct LayerCache {
    double norm = 0.0;
    std::vector<double> pre;  ///< 2 entries per gate
};

struct QpcCache {
    std::vector<LayerCache> layers;
    std::vector<std::vector<double>> a;  ///< a[0] = input
    std::vector<std::vector<double>> z;
};

/// Forward pass that records every pre-gate pair. Adds one per rotation to
/// *rotations when given.
QpcCache qpc_forward(const OrthoNet &net, std::span<const double> x, uint64_t *rotations = nullptr);

struct QpcGradients {
    std::vector<std::vector<double>> theta;  ///< per layer, plan order
    double loss = 0.0;                       ///< batch mean
};

/// Backward pass through a cached forward pass for one sample. Angle
/// gradients are added to `grad`; returns the sample loss.
double qpc_backward(const OrthoNet &net, const QpcCache &cache, int label, QpcGradients &grad,
                    uint64_t *rotations = nullptr);

/// Batch-mean angle gradients of the summed per-node sigmoid cross-entropy.
QpcGradients qpc_gradients(const OrthoNet &net, const Matrix &batch_x, std::span<const int> labels,
                           uint64_t *rotations = nullptr);

/// One SGD step on the angles; returns the batch loss before the step.
double qpc_step(OrthoNet &net, const Matrix &batch_x, std::span<const int> labels, double learning_rate,
                uint64_t *rotations = nullptr);

double qpc_loss(const OrthoNet &net, const Matrix &x, std::span<const int> labels);

struct OrthoTrainConfig {
    size_t epochs = 30;
    size_t batch_size = 10;
    double learning_rate = 0.05;
    uint64_t seed = 0;
    /// SVB only: singular values are clipped to [1/(1+eps), 1+eps].
    double svb_epsilon = 0.01;
    /// SVB only: clip after every `svb_clip_every` steps.
    size_t svb_clip_every = 1;

    void validate() const;
};

struct QpcTrainResult {
    OrthoNet model;
    History history;
    uint64_t rotations = 0;
};

QpcTrainResult qpc_train(OrthoNet net, const LabeledSet &train_set, const LabeledSet &test_set,
                         const OrthoTrainConfig &config);

/// Exact: the QPC forward pass. Sampled: each layer is estimated from the
/// sign-recovery distribution with a per-layer seed derived from mode.seed.
std::vector<double> infer(const OrthoNet &net, std::span<const double> x, const EstimatorMode &mode);

/// Sample k is inferred with seed derive_seed(mode.seed, {k}).
double ortho_accuracy(const OrthoNet &net, const LabeledSet &set, const EstimatorMode &mode);

struct SvbNet {
    std::vector<Matrix> weights;  ///< sizes[l+1] x sizes[l]

    /// Orthonormal rows from random pyramid angles.
    static SvbNet random(const std::vector<size_t> &sizes, uint64_t seed);

    std::vector<size_t> sizes() const;
};

std::vector<double> svb_forward(const SvbNet &net, std::span<const double> x);

/// Clips every singular value of w into [lo, hi]. Returns false if the
/// decomposition produced non-finite values.
bool clip_singular_values(Matrix &w, double lo, double hi);

std::vector<double> singular_values(const Matrix &w);

struct SvbTrainResult {
    SvbNet model;
    History history;
    size_t rerandomized = 0;
};

SvbTrainResult svb_train(SvbNet net, const LabeledSet &train_set, const LabeledSet &test_set,
                         const OrthoTrainConfig &config);

double svb_accuracy(const SvbNet &net, const LabeledSet &set);

struct ScalingRow {
    size_t n = 0;
    double wall_seconds = 0.0;
    uint64_t op_count = 0;
    uint64_t sample_passes = 0;  ///< epochs x samples
    uint64_t param_total = 0;    ///< 0.5 n^2 + 1.5 n - 3
};

/// Trains [n, n, 2] networks on synthetic unit vectors for a fixed number
/// of epochs and samples, timing the training loop and counting rotations.
std::vector<ScalingRow> scaling_benchmark(const std::vector<size_t> &n_list, size_t epochs = 1,
                                          size_t samples = 64, uint64_t seed = 0);

nlohmann::json orthonet_to_json(const OrthoNet &net);
OrthoNet orthonet_from_json(const nlohmann::json &j);

}  // namespace uqnn
