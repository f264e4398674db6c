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
 * Quantum-assisted feedforward networks. The structure is a plain sigmoid
 * MLP; every product W a in the forward pass and W^T delta in the backward
 * pass goes through estimate_matvec, so the estimator mode alone decides
 * whether the network is classical (Exact) or shot-limited (Sampled).
 * Biases and the outer-product weight gradients stay classical.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uqnn/estimators.hpp"
#include "uqnn/labeled.hpp"
#include "uqnn/linalg.hpp"

namespace uqnn {

double sigmoid(double z);

/// Sigmoid cross-entropy of one output node, from its pre-activation:
/// softplus(z) - y z.
double sigmoid_xent(double z, double y);

/// Argmax over two output nodes; ties go to class 0.
int argmax2(std::span<const double> out);

struct EpochRecord {
    size_t epoch = 0;
    double loss = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;
};

using History = std::vector<EpochRecord>;

void write_history_csv(std::ostream &os, const History &history);

/// Explicit call counter for sampled estimators. Every matvec takes the next
/// value, which feeds the per-row seeds.
class EstimatorContext {
  public:
    explicit EstimatorContext(EstimatorMode mode = EstimatorMode::exact()) : mode_(mode) {}

    const EstimatorMode &mode() const { return mode_; }
    uint64_t calls() const { return calls_; }
    uint64_t next_call() { return calls_++; }

  private:
    EstimatorMode mode_;
    uint64_t calls_ = 0;
};

struct Mlp {
    std::vector<size_t> layer_sizes;
    std::vector<Matrix> weights;               ///< weights[l] is sizes[l+1] x sizes[l]
    std::vector<std::vector<double>> biases;

    /// Weights uniform in +-1/sqrt(fan_in), biases zero.
    static Mlp random(const std::vector<size_t> &layer_sizes, uint64_t seed);
    static Mlp zeros(const std::vector<size_t> &layer_sizes);

    size_t n_layers() const { return weights.size(); }
    size_t input_dim() const { return layer_sizes.front(); }
    /// Throws std::invalid_argument on inconsistent shapes or non-finite values.
    void validate() const;
};

struct TrainConfig {
    size_t epochs = 30;
    size_t batch_size = 10;
    double learning_rate = 0.05;
    EstimatorMode mode = EstimatorMode::exact();
    uint64_t seed = 0;

    void validate() const;
};

struct ForwardPass {
    std::vector<std::vector<double>> z;  ///< pre-activations per layer
    std::vector<std::vector<double>> a;  ///< a[0] = input, a[l+1] = sigmoid(z[l])

    const std::vector<double> &output() const { return a.back(); }
};

ForwardPass forward(const Mlp &mlp, std::span<const double> x, EstimatorContext &ctx);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    double loss = 0.0;  ///< batch-mean loss at the current parameters
};

/// Batch-mean gradients of the summed per-node sigmoid cross-entropy.
/// labels[k] selects the one-hot target of row k.
Gradients gradients(const Mlp &mlp, const Matrix &batch_x, std::span<const int> labels, EstimatorContext &ctx);

/// Mean loss with every product computed exactly.
double loss(const Mlp &mlp, const Matrix &x, std::span<const int> labels);

/// One SGD step on a non-empty batch; returns the batch loss before the step.
double backprop_step(Mlp &mlp, const Matrix &batch_x, std::span<const int> labels, const TrainConfig &config,
                     EstimatorContext &ctx);

struct TrainResult {
    Mlp model;
    History history;
};

/// Shuffled mini-batch epochs, deterministic given config.seed. History
/// accuracies are measured in Exact mode; `test` may be empty.
TrainResult train(Mlp mlp, const LabeledSet &train_set, const LabeledSet &test_set, const TrainConfig &config);

std::vector<double> predict_proba(const Mlp &mlp, std::span<const double> x, EstimatorContext &ctx);
int classify(const Mlp &mlp, std::span<const double> x, EstimatorContext &ctx);

/// Accuracy over a set in the context's mode.
double accuracy(const Mlp &mlp, const LabeledSet &set, EstimatorContext &ctx);

nlohmann::json mlp_to_json(const Mlp &mlp);
Mlp mlp_from_json(const nlohmann::json &j);

}  // namespace uqnn
