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


#include "uqnn/selftest.hpp"

#include <algorithm>
#include <cstring>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "uqnn/estimators.hpp"
#include "uqnn/eval.hpp"
#include "uqnn/loaders.hpp"
#include "uqnn/npz.hpp"
#include "uqnn/orthonn.hpp"
#include "uqnn/pyramid.hpp"
#include "uqnn/qnn.hpp"
#include "uqnn/rng.hpp"
#include "uqnn/unary_core.hpp"

namespace uqnn {

namespace {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string &what) {
        if (!ok && passed) {
            detail << what << "; ";
        }
        passed = passed && ok;
    }
};

std::vector<double> random_signed(Rng &rng, size_t d) {
    std::vector<double> v(d);
    do {
        for (double &x : v) {
            x = rng.uniform(-1.0, 1.0);
        }
    } while (norm2(v) < 1e-3);
    return v;
}

std::vector<double> unit(std::vector<double> v) {
    const double n = norm2(v);
    for (double &x : v) {
        x /= n;
    }
    return v;
}

double gaussian(Rng &rng) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Haar-ish orthogonal matrix by Gram-Schmidt on Gaussian rows.
Matrix random_orthogonal(Rng &rng, size_t n) {
    Matrix q(n, n);
    for (size_t r = 0; r < n; ++r) {
        std::vector<double> v(n);
        for (double &x : v) {
            x = gaussian(rng);
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (size_t p = 0; p < r; ++p) {
                const double proj = dot(v, q.row(p));
                for (size_t c = 0; c < n; ++c) {
                    v[c] -= proj * q(p, c);
                }
            }
        }
        v = unit(v);
        std::copy(v.begin(), v.end(), q.row(r).begin());
    }
    return q;
}

/// Determinant by Gaussian elimination with partial pivoting.
double determinant(Matrix a) {
    const size_t n = a.rows();
    double det = 1.0;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        for (size_t r = c + 1; r < n; ++r) {
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) {
                piv = r;
            }
        }
        if (a(piv, c) == 0.0) {
            return 0.0;
        }
        if (piv != c) {
            for (size_t k = 0; k < n; ++k) {
                std::swap(a(piv, k), a(c, k));
            }
            det = -det;
        }
        det *= a(c, c);
        for (size_t r = c + 1; r < n; ++r) {
            const double f = a(r, c) / a(c, c);
            for (size_t k = c; k < n; ++k) {
                a(r, k) -= f * a(c, k);
            }
        }
    }
    return det;
}

double orthonormality_error(const Matrix &w) {
    double err = 0.0;
    for (size_t a = 0; a < w.rows(); ++a) {
        for (size_t b = 0; b < w.rows(); ++b) {
            err = std::max(err, std::abs(dot(w.row(a), w.row(b)) - (a == b ? 1.0 : 0.0)));
        }
    }
    return err;
}

PyramidLayer random_layer(Rng &rng, size_t n_in, size_t n_out) {
    std::vector<double> theta(param_count(n_in, n_out));
    for (double &t : theta) {
        t = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    return PyramidLayer(n_in, n_out, theta);
}

/// Central-difference relative error with a 1e-4 denominator floor.
double relative_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-4});
}

constexpr double kFdStep = 1e-6;
constexpr double kGradTol = 1e-5;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// --- checks ---------------------------------------------------------------

void loader_round_trip(Outcome &out, const SelftestOptions &opt) {
    double worst = 0.0;
    for (LoaderKind kind : {LoaderKind::Parallel, LoaderKind::Diagonal, LoaderKind::SemiDiagonal}) {
        for (size_t d = 2; d <= 32; ++d) {
            Rng rng(derive_seed(opt.seed, {static_cast<uint64_t>(kind), d}));
            LoaderTopology topology(kind, d);
            for (size_t t = 0; t < opt.loader_trials; ++t) {
                const std::vector<double> x = random_signed(rng, d);
                const std::vector<double> xh = unit(x);
                const LoaderAngles angles = compute_angles(topology, x);
                const UnaryState s = run_circuit(build_loader(topology, angles));
                worst = std::max(worst, max_abs_diff(s.amplitudes(), xh));
                const UnaryState back = run_circuit(adjoint_loader(topology, angles), s);
                worst = std::max(worst, std::abs(back[topology.root()] - 1.0));
            }
        }
    }
    out.require(worst <= 1e-12, "max amplitude error " + fmt(worst));
    out.detail << "max error " << fmt(worst);
}

void loader_structure(Outcome &out, const SelftestOptions &) {
    for (size_t d = 2; d <= 64; ++d) {
        const size_t ceil_log2 = static_cast<size_t>(std::ceil(std::log2(static_cast<double>(d)) - 1e-12));
        const std::map<LoaderKind, size_t> depth = {
            {LoaderKind::Parallel, ceil_log2}, {LoaderKind::Diagonal, d - 1}, {LoaderKind::SemiDiagonal, (d + 1) / 2}};
        for (const auto &[kind, expected] : depth) {
            LoaderTopology topology(kind, d);
            const Circuit c = build_loader(topology, compute_angles(topology, std::vector<double>(d, 1.0)));
            const std::string where = std::string(loader_kind_name(kind)) + " d=" + std::to_string(d);
            out.require(c.depth() == expected, where + " depth " + std::to_string(c.depth()));
            out.require(c.count(GateKind::RBS) == d - 1, where + " RBS count");
            out.require(c.count(GateKind::X) == 1, where + " X count");
            out.require(adjoint_loader(topology, compute_angles(topology, std::vector<double>(d, 1.0))).depth() == expected,
                        where + " adjoint depth");
        }
    }
    out.detail << "d = 2..64, three topologies";
}

void dense_oracle(Outcome &out, const SelftestOptions &opt) {
    double worst = 0.0;
    double leak = 0.0;
    Rng rng(derive_seed(opt.seed, {0xde5e}));
    for (size_t n = 2; n <= 12; ++n) {
        for (size_t t = 0; t < 20; ++t) {
            Circuit c(n);
            c.add(Gate::x_init(static_cast<size_t>(rng.below(n))));
            for (size_t g = 0; g < 3 * n; ++g) {
                const size_t a = static_cast<size_t>(rng.below(n));
                size_t b = static_cast<size_t>(rng.below(n - 1));
                b += b >= a ? 1 : 0;
                c.add(Gate::rbs(a, b, rng.uniform(-std::numbers::pi, std::numbers::pi)));
            }
            const UnaryState fast = run_circuit(c);
            const DenseState dense = dense_simulate(c);
            worst = std::max(worst, max_abs_diff(fast.amplitudes(), project_unary(dense)));
            leak = std::max(leak, std::abs(norm2(project_unary(dense)) - 1.0));
        }
        for (LoaderKind kind : {LoaderKind::Parallel, LoaderKind::Diagonal, LoaderKind::SemiDiagonal}) {
            const std::vector<double> x = random_signed(rng, n);
            LoaderTopology topology(kind, n);
            const Circuit c = build_loader(topology, compute_angles(topology, x));
            worst = std::max(worst, max_abs_diff(project_unary(dense_simulate(c)), unit(x)));
        }
    }
    out.require(worst <= 1e-10, "unary vs dense " + fmt(worst));
    out.require(leak <= 1e-10, "weight leaves the unary subspace " + fmt(leak));
    out.detail << "max deviation " << fmt(worst);
}

void signed_ip_identity(Outcome &out, const SelftestOptions &opt) {
    double worst = 0.0;
    Rng rng(derive_seed(opt.seed, {0x519e}));
    for (size_t d = 2; d <= 11; ++d) {
        for (LoaderKind kind : {LoaderKind::Parallel, LoaderKind::Diagonal, LoaderKind::SemiDiagonal}) {
            for (size_t t = 0; t < 5; ++t) {
                const std::vector<double> x = unit(random_signed(rng, d));
                const std::vector<double> w = unit(random_signed(rng, d));
                const Circuit c = signed_ip_circuit(x, w, kind);
                const double expected = (1.0 - dot(w, x)) / 2.0;
                const DenseState dense = dense_simulate(c);
                worst = std::max(worst, std::abs(dense.amp[unary_index(d + 1, kSignedIpAncilla)] - expected));
                worst = std::max(worst, std::abs(run_circuit(c)[kSignedIpAncilla] - expected));
                const Circuit sq = square_ip_circuit(x, w, kind);
                const size_t root = LoaderTopology(kind, d).root();
                worst = std::max(worst, std::abs(dense_simulate(sq).amp[unary_index(d, root)] - dot(w, x)));
            }
        }
    }
    out.require(worst <= 1e-10, "ancilla amplitude error " + fmt(worst));
    out.detail << "max deviation " << fmt(worst);
}

void sign_recovery_distribution(Outcome &out, const SelftestOptions &opt) {
    double worst = 0.0;
    double worst_closed = 0.0;
    Rng rng(derive_seed(opt.seed, {0x5167}));
    for (size_t n = 2; n <= 11; ++n) {
        for (size_t n_out : {size_t{1}, n / 2 + 1, n}) {
            const PyramidLayer layer = random_layer(rng, n, std::min(n_out, n));
            const std::vector<double> x = unit(random_signed(rng, n));
            const DenseState dense = dense_simulate(sign_recovery_circuit(layer, x));
            const std::vector<double> p = inference_distribution(layer, x);
            const std::vector<double> wx = matvec(full_unitary(layer), x);
            const double u = 1.0 / std::sqrt(static_cast<double>(n));
            for (size_t b = 0; b < 2; ++b) {
                for (size_t j = 0; j < n; ++j) {
                    size_t idx = unary_index(n + 1, j + 1) + (b == 1 ? unary_index(n + 1, 0) : 0);
                    const double amp = dense.amp[idx];
                    const double closed = 0.25 * std::pow(wx[j] + (b == 0 ? u : -u), 2);
                    worst = std::max(worst, std::abs(amp * amp - p[b * n + j]));
                    worst_closed = std::max(worst_closed, std::abs(amp * amp - closed));
                }
            }
        }
    }
    out.require(worst <= 1e-10, "dense vs distribution " + fmt(worst));
    out.require(worst_closed <= 1e-10, "dense vs closed form " + fmt(worst_closed));
    out.detail << "max deviation " << fmt(std::max(worst, worst_closed));
}

void decompose_rbs_check(Outcome &out, const SelftestOptions &opt) {
    double worst = 0.0;
    Rng rng(derive_seed(opt.seed, {0xdec0}));
    for (size_t t = 0; t < 100; ++t) {
        const double theta = rng.uniform(-2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
        const Matrix u = dense_unitary(decompose_rbs(theta));
        const auto m = rbs_matrix(theta);
        for (size_t r = 0; r < 4; ++r) {
            for (size_t c = 0; c < 4; ++c) {
                worst = std::max(worst, std::abs(u(r, c) - m[r][c]));
            }
        }
        Circuit direct(2);
        direct.add(Gate::rbs(0, 1, theta));
        worst = std::max(worst, max_abs_diff(u, dense_unitary(direct)));
        out.require(decompose_rbs(theta).count(GateKind::CZ) == 2, "CZ count");
    }
    out.require(worst <= 1e-10, "unitary mismatch " + fmt(worst));
    out.detail << "100 angles, max deviation " << fmt(worst);
}

void pyramid_orthogonality(Outcome &out, const SelftestOptions &opt) {
    double worst = 0.0;
    Rng rng(derive_seed(opt.seed, {0x0a7b}));
    for (size_t n = 2; n <= 24; ++n) {
        for (size_t t = 0; t < 4; ++t) {
            const size_t d = 1 + static_cast<size_t>(rng.below(n));
            const PyramidLayer layer = random_layer(rng, n, d);
            worst = std::max(worst, orthonormality_error(angles_to_matrix(layer)));
            worst = std::max(worst, orthonormality_error(full_unitary(layer)));
            const Circuit c = layer.circuit();
            out.require(c.count(GateKind::RBS) == param_count(n, d), "circuit gate count");
            if (n <= 10) {
                // The circuit on the unary subspace is the same matrix.
                const Matrix u = full_unitary(layer);
                for (size_t j = 0; j < n; ++j) {
                    const std::vector<double> col = project_unary(dense_simulate(c, DenseState::basis(n, unary_index(n, j))));
                    for (size_t r = 0; r < n; ++r) {
                        worst = std::max(worst, std::abs(col[r] - u(r, j)));
                    }
                }
            }
        }
    }
    out.require(worst <= 1e-10, "orthogonality error " + fmt(worst));
    out.detail << "max deviation " << fmt(worst);
}

void pyramid_round_trip(Outcome &out, const SelftestOptions &opt) {
    double worst = 0.0;
    size_t negative = 0;
    Rng rng(derive_seed(opt.seed, {0x7219}));
    for (size_t n = 2; n <= 16; ++n) {
        for (size_t t = 0; t < 6; ++t) {
            Matrix w;
            if (t < 3) {
                const size_t d = 1 + static_cast<size_t>(rng.below(n));
                w = angles_to_matrix(random_layer(rng, n, d));
            } else {
                w = random_orthogonal(rng, n);
                if (t == 5 && determinant(w) > 0.0) {
                    for (size_t c = 0; c < n; ++c) {
                        w(0, c) = -w(0, c);
                    }
                }
                if (determinant(w) < 0.0) {
                    ++negative;
                }
            }
            const PyramidLayer layer = matrix_to_angles(w);
            worst = std::max(worst, max_abs_diff(angles_to_matrix(layer), w));
            if (w.rows() == n) {
                out.require(std::abs(determinant(full_unitary(layer)) - determinant(w)) < 1e-8, "determinant changed");
            }
        }
    }
    out.require(negative > 0, "no det = -1 case exercised");
    out.require(worst <= 1e-8, "round-trip error " + fmt(worst));
    out.detail << "max deviation " << fmt(worst) << ", " << negative << " det=-1 cases";
}

void pyramid_counts(Outcome &out, const SelftestOptions &) {
    for (size_t n = 2; n <= 40; ++n) {
        for (size_t d = 1; d <= n; ++d) {
            const auto plan = pyramid_plan(n, d);
            const size_t expected = (2 * n - 1 - d) * d / 2;
            out.require(param_count(n, d) == expected && plan.size() == expected, "parameter count");
            size_t max_t = 0;
            for (const auto &g : plan) {
                out.require(g.level < d && g.wire >= g.level && g.wire + 2 <= n, "gate outside the triangle");
                out.require(g.timestep == n - 1 - g.wire + 2 * g.level, "timestep");
                max_t = std::max(max_t, g.timestep);
            }
            out.require(max_t == n - 2 + std::min(d, n - 1), "pyramid depth");
        }
        const size_t total = param_count(n, n) + param_count(n, 2);
        out.require(2 * total == n * n + 3 * n - 6, "[n, n, 2] parameter total");
    }
    out.detail << "n = 2..40";
}

void qpc_gradient_check(Outcome &out, const SelftestOptions &opt) {
    double worst = 0.0;
    for (const std::vector<size_t> &sizes : {std::vector<size_t>{5, 2}, {6, 4, 2}, {7, 7, 3, 2}}) {
        Rng rng(derive_seed(opt.seed, {0x9c, sizes.size()}));
        OrthoNet net = OrthoNet::random(sizes, derive_seed(opt.seed, {sizes[0]}));
        Matrix x(3, sizes[0]);
        std::vector<int> labels = {0, 1, 1};
        for (size_t r = 0; r < 3; ++r) {
            const std::vector<double> v = random_signed(rng, sizes[0]);
            std::copy(v.begin(), v.end(), x.row(r).begin());
        }
        const QpcGradients g = qpc_gradients(net, x, labels);
        for (size_t l = 0; l < net.layers.size(); ++l) {
            for (size_t k = 0; k < net.layers[l].theta().size(); ++k) {
                double &th = net.layers[l].theta()[k];
                const double saved = th;
                th = saved + kFdStep;
                const double up = qpc_loss(net, x, labels);
                th = saved - kFdStep;
                const double down = qpc_loss(net, x, labels);
                th = saved;
                worst = std::max(worst, relative_error(g.theta[l][k], (up - down) / (2.0 * kFdStep)));
            }
        }
    }
    out.require(worst < kGradTol, "relative error " + fmt(worst));
    out.detail << "max relative error " << fmt(worst);
}

void qnn_gradient_check(Outcome &out, const SelftestOptions &opt) {
    double worst = 0.0;
    for (const std::vector<size_t> &sizes : {std::vector<size_t>{4, 2}, {5, 4, 2}, {6, 5, 3, 2}}) {
        Rng rng(derive_seed(opt.seed, {0x9d, sizes.size()}));
        Mlp mlp = Mlp::random(sizes, derive_seed(opt.seed, {sizes[0], 1}));
        for (auto &b : mlp.biases) {
            for (double &v : b) {
                v = rng.uniform(-0.5, 0.5);
            }
        }
        Matrix x(4, sizes[0]);
        std::vector<int> labels = {1, 0, 1, 0};
        for (size_t r = 0; r < 4; ++r) {
            const std::vector<double> v = random_signed(rng, sizes[0]);
            std::copy(v.begin(), v.end(), x.row(r).begin());
        }
        EstimatorContext ctx;
        const Gradients g = gradients(mlp, x, labels, ctx);
        auto probe = [&](double &param, double analytic) {
            const double saved = param;
            param = saved + kFdStep;
            const double up = loss(mlp, x, labels);
            param = saved - kFdStep;
            const double down = loss(mlp, x, labels);
            param = saved;
            worst = std::max(worst, relative_error(analytic, (up - down) / (2.0 * kFdStep)));
        };
        for (size_t l = 0; l < mlp.n_layers(); ++l) {
            for (size_t r = 0; r < mlp.weights[l].rows(); ++r) {
                for (size_t c = 0; c < mlp.weights[l].cols(); ++c) {
                    probe(mlp.weights[l](r, c), g.weights[l](r, c));
                }
                probe(mlp.biases[l][r], g.biases[l][r]);
            }
        }
    }
    out.require(worst < kGradTol, "relative error " + fmt(worst));
    out.detail << "max relative error " << fmt(worst);
}

void sampled_concentration(Outcome &out, const SelftestOptions &opt) {
    const std::vector<double> x = {0.5, 0.5, 0.5, 0.5};
    const std::vector<double> u = {0.5, -0.5, 0.5, -0.5};
    const double ip = 0.3;
    std::vector<double> w(4);
    for (size_t i = 0; i < 4; ++i) {
        w[i] = ip * x[i] + std::sqrt(1.0 - ip * ip) * u[i];
    }
    const double root_p = (1.0 - ip) / 2.0;

    std::vector<double> shots_axis, rmse_axis;
    double std400 = 0.0;
    double bias_top = 0.0;
    for (uint64_t shots : {uint64_t{100}, uint64_t{400}, uint64_t{1000}, uint64_t{10000}, uint64_t{100000},
                           uint64_t{1000000}}) {
        double sq_err = 0.0;
        std::vector<double> p_hat;
        double root_sum = 0.0;
        for (size_t t = 0; t < opt.concentration_trials; ++t) {
            const EstimatorMode mode = EstimatorMode::sampled(shots, derive_seed(opt.seed, {shots, t}));
            const double v = estimate_ip(x, w, mode).value;
            sq_err += (v - ip) * (v - ip);
            const double r = (1.0 - v) / 2.0;
            root_sum += r;
            p_hat.push_back(r * r);
        }
        const double n = static_cast<double>(opt.concentration_trials);
        if (shots == 400) {
            std400 = mean_std(p_hat).std;
            continue;
        }
        shots_axis.push_back(static_cast<double>(shots));
        rmse_axis.push_back(std::sqrt(sq_err / n));
        if (shots == 100000) {
            bias_top = std::abs(root_sum / n - root_p);
        }
    }
    const double slope = loglog_slope(shots_axis, rmse_axis);
    out.require(slope >= -0.55 && slope <= -0.45, "error slope " + fmt(slope));
    out.require(std400 <= 0.025, "400-shot std " + fmt(std400));
    out.require(bias_top < 0.005, "bias at 1e5 shots " + fmt(bias_top));
    out.detail << "slope " << fmt(slope) << ", 400-shot std " << fmt(std400);
}

void sampled_layer_estimate(Outcome &out, const SelftestOptions &opt) {
    Rng rng(derive_seed(opt.seed, {0x1a7e}));
    const PyramidLayer layer = random_layer(rng, 6, 3);
    const std::vector<double> x = random_signed(rng, 6);
    const std::vector<double> exact = forward(layer, x);
    const std::vector<double> est = estimate_layer_output(layer, x, EstimatorMode::sampled(200000, opt.seed));
    const double err = max_abs_diff(est, exact);
    out.require(err < 0.05 * norm2(x), "sampled layer error " + fmt(err));
    out.detail << "max error " << fmt(err) << " at 2e5 shots";
}

void svb_clip_bounds(Outcome &out, const SelftestOptions &opt) {
    Rng rng(derive_seed(opt.seed, {0x5fb}));
    const double eps = 0.01;
    for (size_t t = 0; t < 20; ++t) {
        const size_t rows = 1 + static_cast<size_t>(rng.below(8));
        const size_t cols = rows + static_cast<size_t>(rng.below(8));
        Matrix w(rows, cols);
        for (size_t r = 0; r < rows; ++r) {
            for (size_t c = 0; c < cols; ++c) {
                w(r, c) = 2.0 * gaussian(rng);
            }
        }
        out.require(clip_singular_values(w, 1.0 / (1.0 + eps), 1.0 + eps), "decomposition failed");
        for (double s : singular_values(w)) {
            out.require(s >= 1.0 / (1.0 + eps) - 1e-8 && s <= 1.0 + eps + 1e-8, "singular value " + fmt(s));
        }
    }
    out.detail << "20 random matrices";
}

void npz_round_trip(Outcome &out, const SelftestOptions &) {
    NpyArray a{"|u1", {2, 3}, {1, 2, 3, 4, 5, 6}};
    NpyArray b{"<f8", {2}, std::vector<uint8_t>(16, 0)};
    const double vals[2] = {1.5, -2.25};
    std::memcpy(b.data.data(), vals, sizeof vals);
    const auto zip = write_zip({{"a.npy", serialize_npy(a)}, {"b.npy", serialize_npy(b)}});
    const auto members = read_zip(zip);
    out.require(members.size() == 2, "member count");
    const NpyArray a2 = parse_npy(members.at("a.npy"));
    const NpyArray b2 = parse_npy(members.at("b.npy"));
    out.require(a2.descr == a.descr && a2.shape == a.shape && a2.data == a.data, "u1 array changed");
    out.require(b2.descr == b.descr && b2.shape == b.shape && b2.data == b.data, "f8 array changed");
    out.detail << "stored zip with two members";
}

void metrics_reference(Outcome &out, const SelftestOptions &) {
    // Scores with one tie across classes: 8 of 9 positive-negative pairs won, one tied.
    const std::vector<double> scores = {0.9, 0.8, 0.4, 0.4, 0.2, 0.1};
    const std::vector<int> labels = {1, 1, 1, 0, 0, 0};
    const double a = auc(scores, labels);
    out.require(std::abs(a - 8.5 / 9.0) < 1e-15, "auc " + fmt(a));
    const CrossoverReport r = crossover_report(400);
    out.require(r.crossover == 10801, "crossover " + std::to_string(r.crossover));
    out.detail << "auc " << fmt(a) << ", crossover " << r.crossover;
}

using CheckFn = void (*)(Outcome &, const SelftestOptions &);

const std::vector<std::pair<std::string, CheckFn>> &registry() {
    static const std::vector<std::pair<std::string, CheckFn>> checks = {
        {"loader_round_trip", loader_round_trip},
        {"loader_structure", loader_structure},
        {"dense_oracle", dense_oracle},
        {"signed_ip_identity", signed_ip_identity},
        {"sign_recovery_distribution", sign_recovery_distribution},
        {"decompose_rbs", decompose_rbs_check},
        {"pyramid_orthogonality", pyramid_orthogonality},
        {"pyramid_round_trip", pyramid_round_trip},
        {"pyramid_counts", pyramid_counts},
        {"qpc_gradients", qpc_gradient_check},
        {"qnn_gradients", qnn_gradient_check},
        {"sampled_concentration", sampled_concentration},
        {"sampled_layer_estimate", sampled_layer_estimate},
        {"svb_clip_bounds", svb_clip_bounds},
        {"npz_round_trip", npz_round_trip},
        {"metrics_reference", metrics_reference},
    };
    return checks;
}

}  // namespace

std::vector<std::string> selftest_names() {
    std::vector<std::string> names;
    for (const auto &entry : registry()) {
        names.push_back(entry.first);
    }
    return names;
}

CheckResult run_check(const std::string &name, const SelftestOptions &options) {
    const auto &checks = registry();
    const auto it = std::find_if(checks.begin(), checks.end(), [&](const auto &e) { return e.first == name; });
    if (it == checks.end()) {
        throw std::invalid_argument("unknown check '" + name + "'");
    }
    CheckResult result;
    result.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        it->second(outcome, options);
    } catch (const std::exception &e) {
        outcome.passed = false;
        outcome.detail << "exception: " << e.what();
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.passed = outcome.passed;
    result.detail = outcome.detail.str();
    return result;
}

std::vector<CheckResult> run_selftest(const SelftestOptions &options, std::ostream *log) {
    std::vector<CheckResult> results;
    for (const std::string &name : selftest_names()) {
        results.push_back(run_check(name, options));
        if (log != nullptr) {
            const CheckResult &r = results.back();
            *log << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << '\n';
        }
    }
    return results;
}

}  // namespace uqnn
