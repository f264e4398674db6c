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

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "uqnn/linalg.hpp"

namespace uqnn {

/// Feature rows with binary labels; the common currency of the trainers.
struct LabeledSet {
    Matrix x;
    std::vector<int> y;

    size_t size() const { return y.size(); }
    size_t dim() const { return x.cols(); }

    void validate() const {
        if (x.rows() != y.size()) {
            throw std::invalid_argument("LabeledSet: feature rows and labels differ in count");
        }
        for (int label : y) {
            if (label != 0 && label != 1) {
                throw std::invalid_argument("LabeledSet: labels must be 0 or 1");
            }
        }
    }

    /// Rows `idx` in the given order.
    LabeledSet subset(const std::vector<size_t> &idx) const {
        LabeledSet out{Matrix(idx.size(), x.cols()), {}};
        out.y.reserve(idx.size());
        for (size_t r = 0; r < idx.size(); ++r) {
            auto src = x.row(idx.at(r));
            std::copy(src.begin(), src.end(), out.x.row(r).begin());
            out.y.push_back(y[idx[r]]);
        }
        return out;
    }
};

}  // namespace uqnn
