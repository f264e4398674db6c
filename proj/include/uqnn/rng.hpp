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

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace uqnn {

/// SplitMix64 finalizer. Bijective on 64-bit words.
uint64_t mix64(uint64_t x);

/// Derives an independent stream seed from a run seed and a tuple of
/// counters (row index, call counter, epoch, ...). Order matters.
uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> parts);

/// Seeded generator. Uniform doubles are built from the top 53 bits of the
/// engine output so draws are identical across standard libraries.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(mix64(seed)) {}

    uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Lemire's rejection method.
    uint64_t below(uint64_t n);

    /// Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::span<T> items) {
        for (size_t i = items.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace uqnn
