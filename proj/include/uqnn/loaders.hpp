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
 * Unary amplitude-encoding data loaders. A loader excites one root wire and
 * then applies d - 1 RBS gates, each splitting the amplitude held by a source
 * wire with a fresh wire. The three topologies differ only in which wire
 * splits when:
 *
 *   Parallel      binary tree rooted at wire 0, depth ceil(log2 d)
 *   Diagonal      chain 0 -> 1 -> ... -> d-1, depth d - 1
 *   SemiDiagonal  two chains growing outwards from wire ceil(d/2) - 1, depth ceil(d/2)
 */

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "uqnn/unary_core.hpp"

namespace uqnn {

enum class LoaderKind { Parallel, Diagonal, SemiDiagonal };

std::string_view loader_kind_name(LoaderKind kind);
LoaderKind loader_kind_from_name(std::string_view name);

/// One RBS of a loader: wire `source` keeps cos, wire `target` receives sin.
struct Split {
    size_t source;
    size_t target;

    bool operator==(const Split &) const = default;
};

class LoaderTopology {
  public:
    LoaderTopology(LoaderKind kind, size_t d);

    LoaderKind kind() const { return kind_; }
    size_t dim() const { return d_; }
    size_t root() const { return root_; }
    /// Splits in gate order; every wire except the root is a target exactly once.
    const std::vector<Split> &splits() const { return splits_; }

    /// Depth the topology is built to achieve.
    size_t expected_depth() const;

  private:
    LoaderKind kind_;
    size_t d_;
    size_t root_ = 0;
    std::vector<Split> splits_;
};

struct LoaderAngles {
    std::vector<double> theta;
    /// Tree nodes touched while computing the angles (work accounting).
    size_t node_visits = 0;
};

/// Angles such that the loader prepares x / |x|. Interior splits carry
/// non-negative subtree norms; signs are resolved at the split that
/// finalizes each leaf via atan2. Throws on zero or non-finite input.
LoaderAngles compute_angles(const LoaderTopology &topology, std::span<const double> x);

/// X on the root followed by the d - 1 RBS gates.
Circuit build_loader(const LoaderTopology &topology, const LoaderAngles &angles);

/// Gates of the loader reversed with negated angles and no X.
Circuit adjoint_loader(const LoaderTopology &topology, const LoaderAngles &angles);

/// compute_angles + build_loader + run_circuit.
UnaryState load(std::span<const double> x, LoaderKind kind);

}  // namespace uqnn
