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

#include "uqnn/loaders.hpp"
#include "uqnn/rng.hpp"

using namespace uqnn;

namespace {

const LoaderKind kAll[] = {LoaderKind::Parallel, LoaderKind::Diagonal, LoaderKind::SemiDiagonal};

TEST(ComputeAngles, UniformDiagonalAngles) {
    // Tail norms 1, sqrt(3)/2, 1/sqrt(2), 1/2.
    LoaderTopology t(LoaderKind::Diagonal, 4);
    const LoaderAngles a = compute_angles(t, std::vector<double>{0.5, 0.5, 0.5, 0.5});
    ASSERT_EQ(a.theta.size(), 3u);
    EXPECT_NEAR(a.theta[0], 1.0472, 1e-4);
    EXPECT_NEAR(a.theta[1], 0.9553, 1e-4);
    EXPECT_NEAR(a.theta[2], 0.7854, 1e-4);
}

TEST(ComputeAngles, LinearInDimension) {
    for (size_t d : {8u, 64u, 512u}) {
        LoaderTopology t(LoaderKind::SemiDiagonal, d);
        EXPECT_EQ(compute_angles(t, std::vector<double>(d, 1.0)).node_visits, 2 * (d - 1));
    }
}

TEST(ComputeAngles, RejectsZeroAndMismatch) {
    LoaderTopology t(LoaderKind::Parallel, 3);
    EXPECT_THROW(compute_angles(t, std::vector<double>{0.0, 0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(compute_angles(t, std::vector<double>{1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(compute_angles(t, std::vector<double>{1.0, NAN, 0.0}), std::invalid_argument);
}

TEST(Loader, SignedVectorsReplayExactly) {
    Rng rng(4);
    for (LoaderKind kind : kAll) {
        for (size_t d = 2; d <= 12; ++d) {
            for (int t = 0; t < 50; ++t) {
                std::vector<double> x(d);
                for (double &v : x) {
                    v = rng.uniform(-2.0, 2.0);
                }
                const UnaryState s = load(x, kind);
                const double n = norm2(x);
                for (size_t i = 0; i < d; ++i) {
                    EXPECT_NEAR(s[i], x[i] / n, 1e-12);
                }
            }
        }
    }
}

TEST(Loader, SingleRotationForTwoDimensions) {
    for (LoaderKind kind : kAll) {
        const UnaryState s = load(std::vector<double>{3.0, 4.0}, kind);
        EXPECT_NEAR(s[0], 0.6, 1e-15);
        EXPECT_NEAR(s[1], 0.8, 1e-15);
        EXPECT_LT(max_abs_diff(s.amplitudes(),
                               project_unary(dense_simulate(build_loader(
                                   LoaderTopology(kind, 2), compute_angles(LoaderTopology(kind, 2), std::vector<double>{3.0, 4.0}))))),
                  1e-15);
    }
}

TEST(Loader, TopologiesAgreeAtSixteen) {
    Rng rng(8);
    std::vector<double> x(16);
    for (double &v : x) {
        v = rng.uniform(-1.0, 1.0);
    }
    const UnaryState p = load(x, LoaderKind::Parallel);
    EXPECT_LT(max_abs_diff(p.amplitudes(), load(x, LoaderKind::Diagonal).amplitudes()), 1e-12);
    EXPECT_LT(max_abs_diff(p.amplitudes(), load(x, LoaderKind::SemiDiagonal).amplitudes()), 1e-12);
}

TEST(Loader, DepthsAtEight) {
    const std::vector<double> x(8, 1.0);
    const std::pair<LoaderKind, size_t> expect[] = {
        {LoaderKind::Diagonal, 7}, {LoaderKind::Parallel, 3}, {LoaderKind::SemiDiagonal, 4}};
    for (const auto &[kind, depth] : expect) {
        LoaderTopology t(kind, 8);
        const Circuit c = build_loader(t, compute_angles(t, x));
        EXPECT_EQ(c.count(GateKind::RBS), 7u) << loader_kind_name(kind);
        EXPECT_EQ(c.depth(), depth) << loader_kind_name(kind);
        EXPECT_EQ(t.expected_depth(), depth);
    }
}

TEST(Loader, SemiDiagonalRootIsCentral) {
    EXPECT_EQ(LoaderTopology(LoaderKind::SemiDiagonal, 8).root(), 3u);
    EXPECT_EQ(LoaderTopology(LoaderKind::SemiDiagonal, 7).root(), 3u);
    EXPECT_EQ(LoaderTopology(LoaderKind::SemiDiagonal, 2).root(), 0u);
}

TEST(Loader, EveryWireButRootIsTargetedOnce) {
    for (LoaderKind kind : kAll) {
        for (size_t d = 2; d <= 33; ++d) {
            LoaderTopology t(kind, d);
            std::vector<int> hits(d, 0);
            for (const Split &s : t.splits()) {
                ++hits[s.target];
            }
            for (size_t w = 0; w < d; ++w) {
                EXPECT_EQ(hits[w], w == t.root() ? 0 : 1);
            }
        }
    }
}

TEST(AdjointLoader, RootCarriesInnerProduct) {
    Rng rng(12);
    for (LoaderKind kind : kAll) {
        std::vector<double> x(6), w(6);
        for (size_t i = 0; i < 6; ++i) {
            x[i] = rng.uniform(-1.0, 1.0);
            w[i] = rng.uniform(-1.0, 1.0);
        }
        LoaderTopology t(kind, 6);
        Circuit c = build_loader(t, compute_angles(t, x));
        c.append(adjoint_loader(t, compute_angles(t, w)));
        EXPECT_NEAR(run_circuit(c)[t.root()], dot(x, w) / (norm2(x) * norm2(w)), 1e-12);
    }
}

TEST(LoaderKindName, RoundTrips) {
    for (LoaderKind kind : kAll) {
        EXPECT_EQ(loader_kind_from_name(loader_kind_name(kind)), kind);
    }
    EXPECT_THROW(loader_kind_from_name("spiral"), std::invalid_argument);
    EXPECT_THROW(LoaderTopology(LoaderKind::Diagonal, 1), std::invalid_argument);
}

}  // namespace
