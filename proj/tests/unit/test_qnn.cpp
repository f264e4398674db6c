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
#include <sstream>

#include "uqnn/dataio.hpp"
#include "uqnn/qnn.hpp"
#include "uqnn/rng.hpp"

using namespace uqnn;

namespace {

LabeledSet toy_separable(size_t n, uint64_t seed) {
    Rng rng(seed);
    LabeledSet s;
    s.x = Matrix(n, 4);
    for (size_t r = 0; r < n; ++r) {
        const int label = static_cast<int>(r % 2);
        for (size_t c = 0; c < 4; ++c) {
            s.x(r, c) = rng.uniform(-0.3, 0.3);
        }
        s.x(r, 0) += label == 1 ? 1.0 : -1.0;
        s.y.push_back(label);
    }
    return s;
}

LabeledSet synthetic_set(size_t k, bool train_split) {
    const PreparedSplits s = prepare_splits(synthetic_archive(400, 200, Task::Pneumonia, 3), Task::Pneumonia, k, true);
    return train_split ? s.train.labeled() : s.test.labeled();
}

TEST(Sigmoid, StableAtExtremes) {
    EXPECT_EQ(sigmoid(800.0), 1.0);
    EXPECT_EQ(sigmoid(-800.0), 0.0);
    EXPECT_NEAR(sigmoid(0.0), 0.5, 0.0);
    EXPECT_NEAR(sigmoid_xent(0.0, 1.0), std::log(2.0), 1e-15);
    EXPECT_NEAR(sigmoid_xent(-800.0, 1.0), 800.0, 1e-9);
    EXPECT_TRUE(std::isfinite(sigmoid_xent(800.0, 0.0)));
}

TEST(Argmax2, TiesGoToClassZero) {
    EXPECT_EQ(argmax2(std::vector<double>{0.5, 0.5}), 0);
    EXPECT_EQ(argmax2(std::vector<double>{0.4, 0.6}), 1);
}

TEST(Mlp, RandomInitIsBoundedAndSeeded) {
    const Mlp a = Mlp::random({8, 4, 2}, 5);
    const Mlp b = Mlp::random({8, 4, 2}, 5);
    EXPECT_EQ(mlp_to_json(a), mlp_to_json(b));
    for (double v : a.weights[0].data()) {
        EXPECT_LE(std::abs(v), 1.0 / std::sqrt(8.0));
    }
    EXPECT_THROW(Mlp::random({4}, 1), std::invalid_argument);
}

TEST(Gradients, ExactMatchFiniteDifferences) {
    Mlp mlp = Mlp::random({4, 5, 2}, 9);
    const LabeledSet set = toy_separable(6, 2);
    EstimatorContext ctx;
    const Gradients g = gradients(mlp, set.x, set.y, ctx);
    const double eps = 1e-6;
    for (size_t l = 0; l < mlp.n_layers(); ++l) {
        for (size_t i = 0; i < mlp.weights[l].data().size(); ++i) {
            double &p = mlp.weights[l].data()[i];
            const double saved = p;
            p = saved + eps;
            const double up = loss(mlp, set.x, set.y);
            p = saved - eps;
            const double down = loss(mlp, set.x, set.y);
            p = saved;
            const double fd = (up - down) / (2 * eps);
            const double a = g.weights[l].data()[i];
            EXPECT_LT(std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-4}), 1e-5);
        }
    }
    EXPECT_NEAR(g.loss, loss(mlp, set.x, set.y), 1e-12);
}

TEST(Train, SampledModeStillLearnsSeparableData) {
    const LabeledSet set = toy_separable(60, 4);
    const Mlp init = Mlp::random({4, 4, 2}, 1);
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.learning_rate = 0.5;
    cfg.mode = EstimatorMode::sampled(400, 8);
    const double before = loss(init, set.x, set.y);
    const TrainResult r = train(init, set, {}, cfg);
    EXPECT_LT(loss(r.model, set.x, set.y), before);
    ASSERT_EQ(r.history.size(), 10u);

    TrainConfig exact_cfg = cfg;
    exact_cfg.mode = EstimatorMode::exact();
    const Mlp exact_model = train(init, set, {}, exact_cfg).model;
    EXPECT_NE(mlp_to_json(exact_model), mlp_to_json(r.model));
}

TEST(Train, DeterministicGivenSeed) {
    const LabeledSet set = toy_separable(40, 7);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 11;
    cfg.mode = EstimatorMode::sampled(100, 2);
    const TrainResult a = train(Mlp::random({4, 3, 2}, 1), set, set, cfg);
    const TrainResult b = train(Mlp::random({4, 3, 2}, 1), set, set, cfg);
    EXPECT_EQ(mlp_to_json(a.model), mlp_to_json(b.model));
    std::ostringstream ha, hb;
    write_history_csv(ha, a.history);
    write_history_csv(hb, b.history);
    EXPECT_EQ(ha.str(), hb.str());
    EXPECT_EQ(ha.str().substr(0, ha.str().find('\n')), "epoch,loss,train_acc,test_acc");
}

TEST(Inference, SampledOutputsTrackExactOnTrainedNet) {
    const LabeledSet train_set = synthetic_set(4, true);
    const LabeledSet test_set = synthetic_set(4, false);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.learning_rate = 0.5;
    const Mlp model = train(Mlp::random({4, 4, 2}, 3), train_set, test_set, cfg).model;
    EstimatorContext exact;
    EstimatorContext sampled(EstimatorMode::sampled(400, 77));
    size_t close = 0, agree = 0;
    for (size_t k = 0; k < test_set.size(); ++k) {
        const auto e = predict_proba(model, test_set.x.row(k), exact);
        const auto s = predict_proba(model, test_set.x.row(k), sampled);
        close += std::abs(e[0] - s[0]) <= 0.1 && std::abs(e[1] - s[1]) <= 0.1 ? 1 : 0;
        agree += argmax2(e) == argmax2(s) ? 1 : 0;
    }
    EXPECT_GE(static_cast<double>(close) / test_set.size(), 0.90);
    EXPECT_GE(static_cast<double>(agree) / test_set.size(), 0.95);
}

TEST(Training, ReachesUsefulAccuracyOnSyntheticData) {
    const LabeledSet train_set = synthetic_set(8, true);
    const LabeledSet test_set = synthetic_set(8, false);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.learning_rate = 0.5;
    const TrainResult r = train(Mlp::random({8, 4, 2}, 3), train_set, test_set, cfg);
    EstimatorContext ctx;
    EXPECT_GT(accuracy(r.model, test_set, ctx), 0.7);
    EXPECT_NEAR(r.history.back().test_acc, accuracy(r.model, test_set, ctx), 1e-15);
}

TEST(MlpJson, RoundTripAndValidation) {
    const Mlp m = Mlp::random({3, 2, 2}, 4);
    EXPECT_EQ(mlp_to_json(mlp_from_json(mlp_to_json(m))), mlp_to_json(m));
    auto j = mlp_to_json(m);
    j["weights"][0][0].push_back(1.0);
    EXPECT_ANY_THROW(mlp_from_json(j));
}

TEST(TrainConfig, RejectsBadValues) {
    TrainConfig cfg;
    cfg.batch_size = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = TrainConfig{};
    cfg.learning_rate = NAN;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(EstimatorContext, CountsCalls) {
    Mlp mlp = Mlp::random({4, 3, 2}, 1);
    EstimatorContext ctx(EstimatorMode::sampled(50, 1));
    forward(mlp, std::vector<double>{0.1, 0.2, 0.3, 0.4}, ctx);
    EXPECT_EQ(ctx.calls(), 2u);
}

}  // namespace
