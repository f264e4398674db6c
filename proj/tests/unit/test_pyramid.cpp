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
#include <numbers>

#include "uqnn/pyramid.hpp"
#include "uqnn/rng.hpp"

using namespace uqnn;

namespace {

constexpr double kPi = std::numbers::pi;

PyramidLayer random_layer(uint64_t seed, size_t n_in, size_t n_out) {
    Rng rng(seed);
    std::vector<double> theta(param_count(n_in, n_out));
    for (double &t : theta) {
        t = rng.uniform(-kPi, kPi);
    }
    return PyramidLayer(n_in, n_out, theta);
}

TEST(ParamCount, Formula) {
    EXPECT_EQ(param_count(8, 4), 22u);
    EXPECT_EQ(param_count(4, 2), 5u);
    EXPECT_EQ(param_count(4, 4), 6u);
    EXPECT_EQ(param_count(2, 1), 1u);
    EXPECT_THROW(param_count(4, 5), std::invalid_argument);
    EXPECT_THROW(param_count(4, 0), std::invalid_argument);
}

TEST(Plan, TimestepsAndOrder) {
    const auto plan = pyramid_plan(4, 2);
    ASSERT_EQ(plan.size(), 5u);
    // Level 0 climbs wires 2, 1, 0 at t = 1, 2, 3; level 1 climbs 2, 1 at t = 3, 4.
    EXPECT_EQ(plan[0], (PyramidGate{2, 0, 1}));
    EXPECT_EQ(plan[1], (PyramidGate{1, 0, 2}));
    EXPECT_EQ(plan[2], (PyramidGate{0, 0, 3}));
    EXPECT_EQ(plan[3], (PyramidGate{2, 1, 3}));
    EXPECT_EQ(plan[4], (PyramidGate{1, 1, 4}));
}

TEST(AnglesToMatrix, TwoByTwoOrientation) {
    const double t = 0.7;
    const Matrix w = angles_to_matrix(PyramidLayer(2, 2, {t}));
    EXPECT_NEAR(w(0, 0), std::cos(t), 1e-15);
    EXPECT_NEAR(w(0, 1), std::sin(t), 1e-15);
    EXPECT_NEAR(w(1, 0), -std::sin(t), 1e-15);
    EXPECT_NEAR(w(1, 1), std::cos(t), 1e-15);
}

TEST(AnglesToMatrix, RowsOrthonormalAtEight) {
    const Matrix w = angles_to_matrix(random_layer(3, 8, 8));
    const Matrix g = matmul(w, w.transposed());
    EXPECT_LT(max_abs_diff(g, Matrix::identity(8)), 1e-12);
}

TEST(MatrixToAngles, RoundTripRecoversAngles) {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const PyramidLayer layer = random_layer(seed, 6, 3);
        const PyramidLayer back = matrix_to_angles(angles_to_matrix(layer));
        EXPECT_LT(max_abs_diff(angles_to_matrix(back), angles_to_matrix(layer)), 1e-10);
    }
    // Interior angles in [0, pi] survive unchanged.
    Rng rng(4);
    std::vector<double> theta(param_count(5, 2));
    const auto plan = pyramid_plan(5, 2);
    for (size_t k = 0; k < theta.size(); ++k) {
        const bool last = plan[k].wire == 3;
        theta[k] = last ? rng.uniform(-3.0, 3.0) : rng.uniform(0.1, 3.0);
    }
    const PyramidLayer back = matrix_to_angles(angles_to_matrix(PyramidLayer(5, 2, theta)));
    for (size_t k = 0; k < theta.size(); ++k) {
        EXPECT_NEAR(back.theta()[k], theta[k], 1e-9) << k;
    }
}

TEST(MatrixToAngles, ReflectionUsesRowSign) {
    Matrix w = angles_to_matrix(random_layer(9, 5, 5));
    for (size_t c = 0; c < 5; ++c) {
        w(2, c) = -w(2, c);
    }
    const PyramidLayer layer = matrix_to_angles(w);
    EXPECT_LT(max_abs_diff(angles_to_matrix(layer), w), 1e-10);
    EXPECT_NE(layer.row_signs(), std::vector<int>(5, 1));
}

TEST(MatrixToAngles, RejectsNonOrthonormal) {
    Matrix w(2, 3);
    w(0, 0) = 1.0;
    w(1, 0) = 1.0;
    EXPECT_THROW(matrix_to_angles(w), std::invalid_argument);
}

TEST(Forward, QuarterTurnSwapsWithSign) {
    const std::vector<double> x = {0.3, -0.7};
    const auto y = forward(PyramidLayer(2, 2, {kPi / 2}), x);
    EXPECT_NEAR(y[0], x[1], 1e-15);
    EXPECT_NEAR(y[1], -x[0], 1e-15);
}

TEST(Forward, MatchesMatrixProductAndCountsRotations) {
    const PyramidLayer layer = random_layer(6, 7, 4);
    Rng rng(1);
    std::vector<double> x(7);
    for (double &v : x) {
        v = rng.uniform(-1.0, 1.0);
    }
    uint64_t rotations = 0;
    const auto y = forward(layer, x, &rotations);
    EXPECT_LT(max_abs_diff(y, matvec(angles_to_matrix(layer), x)), 1e-12);
    EXPECT_EQ(rotations, param_count(7, 4));
    EXPECT_THROW(forward(layer, std::vector<double>(6, 1.0)), std::invalid_argument);
}

TEST(Forward, CircuitOnUnaryStateAgrees) {
    const PyramidLayer layer = random_layer(2, 6, 6);
    const std::vector<double> x = {0.1, 0.2, -0.3, 0.4, 0.5, -0.6};
    const double n = norm2(x);
    std::vector<double> xh(x);
    for (double &v : xh) {
        v /= n;
    }
    const UnaryState s = run_circuit(layer.circuit(), UnaryState::from_amplitudes(xh));
    EXPECT_LT(max_abs_diff(s.amplitudes(), forward_full(layer, xh)), 1e-12);
}

TEST(InferenceDistribution, IdentityLayerOnFirstBasisVector) {
    const PyramidLayer layer = PyramidLayer::zeros(4, 4);
    const auto p = inference_distribution(layer, std::vector<double>{1.0, 0.0, 0.0, 0.0});
    EXPECT_NEAR(p[0], 0.5625, 1e-15);
    EXPECT_NEAR(p[4], 0.0625, 1e-15);
    EXPECT_NEAR((p[0] - p[4]) * 2.0, 1.0, 1e-15);  // sqrt(4) * difference = x_1
    const DenseState d = dense_simulate(sign_recovery_circuit(layer, std::vector<double>{1.0, 0.0, 0.0, 0.0}));
    EXPECT_NEAR(std::pow(d.amp[unary_index(5, 1)], 2), 0.5625, 1e-12);
    EXPECT_NEAR(std::pow(d.amp[unary_index(5, 1) + unary_index(5, 0)], 2), 0.0625, 1e-12);
}

TEST(InferenceDistribution, SumsToOneOverUnaryRegister) {
    const PyramidLayer layer = random_layer(8, 5, 3);
    const std::vector<double> x = {0.2, 0.4, -0.4, 0.2, 0.0};
    std::vector<double> xh(x);
    const double n = norm2(x);
    for (double &v : xh) {
        v /= n;
    }
    double total = 0.0;
    for (double p : inference_distribution(layer, xh)) {
        total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_THROW(inference_distribution(layer, x), std::invalid_argument);
}

TEST(EstimateLayerOutput, ManyShotsConverge) {
    const PyramidLayer layer = random_layer(10, 8, 8);
    Rng rng(2);
    std::vector<double> x(8);
    for (double &v : x) {
        v = rng.uniform(-1.0, 1.0);
    }
    const double n = norm2(x);
    for (double &v : x) {
        v /= n;
    }
    const auto exact = forward(layer, x);
    const auto est = estimate_layer_output(layer, x, EstimatorMode::sampled(100000, 3));
    for (size_t j = 0; j < 8; ++j) {
        EXPECT_NEAR(est[j], exact[j], 0.02);
    }
    EXPECT_EQ(estimate_layer_output(layer, x, EstimatorMode::exact()), exact);
}

TEST(SignRecoveryCircuit, RequiresPositiveRowSigns) {
    const PyramidLayer layer(3, 3, {0.1, 0.2, 0.3}, {1, -1, 1});
    EXPECT_THROW(sign_recovery_circuit(layer, std::vector<double>{1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST(LayerJson, RoundTrip) {
    const PyramidLayer layer(4, 2, {0.1, 0.2, 0.3, 0.4, 0.5}, {1, -1});
    EXPECT_EQ(layer_from_json(layer_to_json(layer)), layer);
}

TEST(PyramidLayer, ValidatesInputs) {
    EXPECT_THROW(PyramidLayer(4, 2, {0.1}), std::invalid_argument);
    EXPECT_THROW(PyramidLayer(2, 1, {NAN}), std::invalid_argument);
    EXPECT_THROW(PyramidLayer(2, 1, {0.1}, {2}), std::invalid_argument);
}

}  // namespace
