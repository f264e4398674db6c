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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "uqnn/dataio.hpp"
#include "uqnn/orthonn.hpp"
#include "uqnn/rng.hpp"

using namespace uqnn;

namespace {

LabeledSet synthetic_set(size_t k, bool train_split) {
    const PreparedSplits s = prepare_splits(synthetic_archive(400, 200, Task::Pneumonia, 3), Task::Pneumonia, k, true);
    return train_split ? s.train.labeled() : s.test.labeled();
}

PyramidLayer random_layer(Rng &rng, size_t n_in, size_t n_out) {
    std::vector<double> theta(param_count(n_in, n_out));
    for (double &t : theta) {
        t = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    return PyramidLayer(n_in, n_out, theta);
}

TEST(QpcForward, SingleTwoByTwoLayerClosedForm) {
    const double t = 0.9;
    OrthoNet net{{PyramidLayer(2, 2, {t})}};
    const std::vector<double> x = {1.5, -0.5};
    const QpcCache c = qpc_forward(net, x);
    const double z0 = std::cos(t) * x[0] + std::sin(t) * x[1];
    const double z1 = -std::sin(t) * x[0] + std::cos(t) * x[1];
    EXPECT_NEAR(c.a.back()[0], 1.0 / (1.0 + std::exp(-z0)), 1e-15);
    EXPECT_NEAR(c.a.back()[1], 1.0 / (1.0 + std::exp(-z1)), 1e-15);
}

TEST(QpcForward, MatchesDenseMatrixForward) {
    Rng rng(4);
    OrthoNet net = OrthoNet::random({8, 6, 2}, 5);
    std::vector<double> x(8);
    for (double &v : x) {
        v = rng.uniform(-1.0, 1.0);
    }
    std::vector<double> a = x;
    for (const auto &layer : net.layers) {
        std::vector<double> z = matvec(angles_to_matrix(layer), a);
        for (double &v : z) {
            v = sigmoid(v);
        }
        a = z;
    }
    EXPECT_LT(max_abs_diff(qpc_forward(net, x).a.back(), a), 1e-10);
    EXPECT_LT(max_abs_diff(infer(net, x, EstimatorMode::exact()), a), 1e-10);
}

TEST(QpcGradients, FiniteDifferencesOnEightByFour) {
    Rng rng(6);
    for (int trial = 0; trial < 3; ++trial) {
        OrthoNet net{{random_layer(rng, 8, 4)}};
        Matrix x(4, 8);
        for (double &v : x.data()) {
            v = rng.uniform(-1.0, 1.0);
        }
        const std::vector<int> labels = {0, 3, 1, 2};
        const QpcGradients g = qpc_gradients(net, x, labels);
        for (size_t k = 0; k < net.layers[0].theta().size(); ++k) {
            double &th = net.layers[0].theta()[k];
            const double saved = th;
            th = saved + 1e-6;
            const double up = qpc_loss(net, x, labels);
            th = saved - 1e-6;
            const double down = qpc_loss(net, x, labels);
            th = saved;
            const double fd = (up - down) / 2e-6;
            EXPECT_LT(std::abs(g.theta[0][k] - fd) / std::max({std::abs(fd), std::abs(g.theta[0][k]), 1e-4}), 1e-5);
        }
    }
}

TEST(QpcBackward, RotationCountPerLayer) {
    OrthoNet net = OrthoNet::random({8, 4, 2}, 1);
    const std::vector<double> x(8, 0.3);
    uint64_t fwd = 0, bwd = 0;
    const QpcCache c = qpc_forward(net, x, &fwd);
    QpcGradients g;
    for (const auto &l : net.layers) {
        g.theta.emplace_back(l.theta().size(), 0.0);
    }
    qpc_backward(net, c, 1, g, &bwd);
    EXPECT_EQ(fwd, param_count(8, 4) + param_count(4, 2));
    EXPECT_EQ(bwd, fwd);
}

TEST(QpcTrain, LearnsSyntheticTask) {
    const LabeledSet train_set = synthetic_set(8, true);
    const LabeledSet test_set = synthetic_set(8, false);
    OrthoTrainConfig cfg;
    cfg.epochs = 15;
    cfg.learning_rate = 0.5;
    const QpcTrainResult r = qpc_train(OrthoNet::random({8, 2}, 1), train_set, test_set, cfg);
    EXPECT_GT(ortho_accuracy(r.model, test_set, EstimatorMode::exact()), 0.7);
    EXPECT_EQ(r.rotations, 2 * cfg.epochs * train_set.size() * param_count(8, 2));
}

TEST(Infer, SampledAgreesWithExactOnTrainedNet) {
    const LabeledSet train_set = synthetic_set(8, true);
    const LabeledSet test_set = synthetic_set(8, false);
    OrthoTrainConfig cfg;
    cfg.epochs = 10;
    cfg.learning_rate = 0.5;
    const OrthoNet net = qpc_train(OrthoNet::random({8, 2}, 2), train_set, test_set, cfg).model;
    size_t agree = 0;
    for (size_t k = 0; k < test_set.size(); ++k) {
        const auto e = infer(net, test_set.x.row(k), EstimatorMode::exact());
        const auto s = infer(net, test_set.x.row(k), EstimatorMode::sampled(10000, k));
        agree += argmax2(e) == argmax2(s) ? 1 : 0;
    }
    EXPECT_GE(static_cast<double>(agree) / test_set.size(), 0.95);
}

TEST(Svb, ClipBoundsHold) {
    Rng rng(3);
    Matrix w(4, 9);
    for (double &v : w.data()) {
        v = rng.uniform(-3.0, 3.0);
    }
    ASSERT_TRUE(clip_singular_values(w, 1.0 / 1.01, 1.01));
    for (double s : singular_values(w)) {
        EXPECT_GE(s, 1.0 / 1.01 - 1e-8);
        EXPECT_LE(s, 1.01 + 1e-8);
    }
}

TEST(Svb, InitialWeightsHaveOrthonormalRows) {
    const SvbNet net = SvbNet::random({8, 4, 2}, 3);
    for (const Matrix &w : net.weights) {
        EXPECT_LT(max_abs_diff(matmul(w, w.transposed()), Matrix::identity(w.rows())), 1e-12);
    }
}

TEST(Svb, InfiniteEpsilonIsPlainSgd) {
    // Unbounded epsilon never clips, so the weights drift off the orthogonal set.
    const LabeledSet train_set = synthetic_set(4, true);
    SvbNet net = SvbNet::random({4, 2}, 1);
    OrthoTrainConfig cfg;
    cfg.epochs = 2;
    cfg.svb_epsilon = std::numeric_limits<double>::infinity();
    const SvbTrainResult r = svb_train(net, train_set, {}, cfg);
    EXPECT_EQ(r.rerandomized, 0u);
    bool moved_off = false;
    for (double s : singular_values(r.model.weights[0])) {
        moved_off = moved_off || std::abs(s - 1.0) > 0.011;
    }
    EXPECT_TRUE(moved_off);
    cfg.svb_epsilon = 0.01;
    const SvbTrainResult clipped = svb_train(net, train_set, {}, cfg);
    for (double s : singular_values(clipped.model.weights[0])) {
        EXPECT_LE(std::abs(s - 1.0), 0.0100001);
    }
}

TEST(Scaling, OpCountsFollowParameterTotal) {
    const auto rows = scaling_benchmark({4, 8, 16}, 2, 5, 1);
    ASSERT_EQ(rows.size(), 3u);
    for (const auto &r : rows) {
        EXPECT_EQ(2 * r.param_total, r.n * r.n + 3 * r.n - 6);
        EXPECT_EQ(r.op_count, 2 * r.sample_passes * r.param_total);
        EXPECT_EQ(r.sample_passes, 10u);
    }
    EXPECT_LT(rows[0].op_count, rows[1].op_count);
    EXPECT_LT(rows[1].op_count, rows[2].op_count);
}

TEST(OrthoNet, JsonRoundTripAndValidation) {
    const OrthoNet net = OrthoNet::random({6, 4, 2}, 8);
    const OrthoNet back = orthonet_from_json(orthonet_to_json(net));
    EXPECT_EQ(back.layers, net.layers);
    EXPECT_EQ(net.param_total(), param_count(6, 4) + param_count(4, 2));
    EXPECT_THROW(OrthoNet::random({4, 6, 2}, 1), std::invalid_argument);
    EXPECT_THROW(OrthoNet::random({4, 3}, 1), std::invalid_argument);
}

}  // namespace
