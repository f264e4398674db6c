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

#include "uqnn/loaders.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uqnn {

std::string_view loader_kind_name(LoaderKind kind) {
    switch (kind) {
        case LoaderKind::Parallel:
            return "parallel";
        case LoaderKind::Diagonal:
            return "diagonal";
        case LoaderKind::SemiDiagonal:
            return "semi_diagonal";
    }
    return "?";
}

LoaderKind loader_kind_from_name(std::string_view name) {
    for (LoaderKind k : {LoaderKind::Parallel, LoaderKind::Diagonal, LoaderKind::SemiDiagonal}) {
        if (loader_kind_name(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown loader topology '" + std::string(name) + "'");
}

LoaderTopology::LoaderTopology(LoaderKind kind, size_t d) : kind_(kind), d_(d) {
    if (d < 2) {
        throw std::invalid_argument("LoaderTopology: dimension must be at least 2");
    }
    switch (kind) {
        case LoaderKind::Diagonal:
            root_ = 0;
            for (size_t i = 0; i + 1 < d; ++i) {
                splits_.push_back({i, i + 1});
            }
            break;
        case LoaderKind::Parallel: {
            // Full binary tree over the next power of two; splits that would
            // create a wire >= d only ever carry zero amplitude and are pruned.
            root_ = 0;
            const size_t padded = std::bit_ceil(d);
            for (size_t half = padded / 2; half >= 1; half /= 2) {
                for (size_t source = 0; source < padded; source += 2 * half) {
                    if (source + half < d) {
                        splits_.push_back({source, source + half});
                    }
                }
            }
            break;
        }
        case LoaderKind::SemiDiagonal: {
            root_ = (d + 1) / 2 - 1;
            splits_.push_back({root_, root_ + 1});
            std::vector<Split> left;
            for (size_t w = root_; w >= 1; --w) {
                left.push_back({w, w - 1});
            }
            std::vector<Split> right;
            for (size_t w = root_ + 1; w + 1 < d; ++w) {
                right.push_back({w, w + 1});
            }
            for (size_t step = 0; step < std::max(left.size(), right.size()); ++step) {
                if (step < left.size()) {
                    splits_.push_back(left[step]);
                }
                if (step < right.size()) {
                    splits_.push_back(right[step]);
                }
            }
            break;
        }
    }
}

size_t LoaderTopology::expected_depth() const {
    switch (kind_) {
        case LoaderKind::Parallel:
            return static_cast<size_t>(std::bit_width(d_ - 1));
        case LoaderKind::Diagonal:
            return d_ - 1;
        case LoaderKind::SemiDiagonal:
            return (d_ + 1) / 2;
    }
    return 0;
}

LoaderAngles compute_angles(const LoaderTopology &topology, std::span<const double> x) {
    const size_t d = topology.dim();
    if (x.size() != d) {
        throw std::invalid_argument("compute_angles: vector length does not match the topology");
    }
    double norm_sq = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("compute_angles: non-finite component");
        }
        norm_sq += v * v;
    }
    if (norm_sq == 0.0) {
        throw std::invalid_argument("compute_angles: zero vector cannot be loaded");
    }
    const double inv_norm = 1.0 / std::sqrt(norm_sq);

    // One reverse sweep over the splits: sq[w] accumulates the squared norm of
    // the subtree that wire w still owns at that point of the circuit.
    std::vector<double> signed_leaf(d);
    std::vector<double> sq(d);
    for (size_t i = 0; i < d; ++i) {
        signed_leaf[i] = x[i] * inv_norm;
        sq[i] = signed_leaf[i] * signed_leaf[i];
    }
    std::vector<bool> splits_later(d, false);

    const auto &splits = topology.splits();
    LoaderAngles out;
    out.theta.resize(splits.size());
    for (size_t k = splits.size(); k-- > 0;) {
        const auto [s, t] = splits[k];
        const double keep = splits_later[s] ? std::sqrt(sq[s]) : signed_leaf[s];
        const double fresh = splits_later[t] ? std::sqrt(sq[t]) : signed_leaf[t];
        out.theta[k] = std::atan2(fresh, keep);
        sq[s] += sq[t];
        splits_later[s] = true;
        out.node_visits += 2;
    }
    return out;
}

namespace {

void check_angles(const LoaderTopology &topology, const LoaderAngles &angles) {
    if (angles.theta.size() != topology.splits().size()) {
        throw std::invalid_argument("loader: angle count must be d - 1");
    }
}

}  // namespace

Circuit build_loader(const LoaderTopology &topology, const LoaderAngles &angles) {
    check_angles(topology, angles);
    Circuit c(topology.dim());
    c.add(Gate::x_init(topology.root()));
    const auto &splits = topology.splits();
    for (size_t k = 0; k < splits.size(); ++k) {
        c.add(Gate::rbs(splits[k].source, splits[k].target, angles.theta[k]));
    }
    return c;
}

Circuit adjoint_loader(const LoaderTopology &topology, const LoaderAngles &angles) {
    check_angles(topology, angles);
    Circuit c(topology.dim());
    const auto &splits = topology.splits();
    for (size_t k = splits.size(); k-- > 0;) {
        c.add(Gate::rbs(splits[k].source, splits[k].target, -angles.theta[k]));
    }
    return c;
}

UnaryState load(std::span<const double> x, LoaderKind kind) {
    LoaderTopology topology(kind, x.size());
    return run_circuit(build_loader(topology, compute_angles(topology, x)));
}

}  // namespace uqnn
