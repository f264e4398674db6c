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


#include "reference_mlp.hpp"

#include <algorithm>
#include <cmath>

namespace reference {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::vector<Vec> activations(const Net &net, const Vec &x) {
    std::vector<Vec> acts{x};
    for (size_t l = 0; l < net.w.size(); ++l) {
        Vec next(net.w[l].size());
        for (size_t r = 0; r < next.size(); ++r) {
            double z = net.b[l][r];
            for (size_t c = 0; c < acts.back().size(); ++c) {
                z += net.w[l][r][c] * acts.back()[c];
            }
            next[r] = logistic(z);
        }
        acts.push_back(next);
    }
    return acts;
}

double sample_loss(const Net &net, const Vec &x, int label) {
    const Vec out = activations(net, x).back();
    double loss = 0.0;
    for (size_t j = 0; j < out.size(); ++j) {
        const double y = static_cast<int>(j) == label ? 1.0 : 0.0;
        loss -= y * std::log(out[j]) + (1.0 - y) * std::log(1.0 - out[j]);
    }
    return loss;
}

void sgd_step(Net &net, const std::vector<Vec> &xs, const std::vector<int> &labels, double lr) {
    const size_t L = net.w.size();
    std::vector<Mat> gw(L);
    std::vector<Vec> gb(L);
    for (size_t l = 0; l < L; ++l) {
        gw[l].assign(net.w[l].size(), Vec(net.w[l][0].size(), 0.0));
        gb[l].assign(net.b[l].size(), 0.0);
    }
    for (size_t k = 0; k < xs.size(); ++k) {
        const std::vector<Vec> acts = activations(net, xs[k]);
        Vec delta = acts.back();
        for (size_t j = 0; j < delta.size(); ++j) {
            delta[j] -= static_cast<int>(j) == labels[k] ? 1.0 : 0.0;
        }
        for (size_t l = L; l-- > 0;) {
            for (size_t r = 0; r < delta.size(); ++r) {
                gb[l][r] += delta[r];
                for (size_t c = 0; c < acts[l].size(); ++c) {
                    gw[l][r][c] += delta[r] * acts[l][c];
                }
            }
            if (l == 0) {
                break;
            }
            Vec prev(acts[l].size(), 0.0);
            for (size_t c = 0; c < prev.size(); ++c) {
                for (size_t r = 0; r < delta.size(); ++r) {
                    prev[c] += net.w[l][r][c] * delta[r];
                }
                prev[c] *= acts[l][c] * (1.0 - acts[l][c]);
            }
            delta = prev;
        }
    }
    const double scale = 1.0 / static_cast<double>(xs.size());
    for (size_t l = 0; l < L; ++l) {
        for (size_t r = 0; r < net.w[l].size(); ++r) {
            for (size_t c = 0; c < net.w[l][r].size(); ++c) {
                net.w[l][r][c] -= lr * gw[l][r][c] * scale;
            }
            net.b[l][r] -= lr * gb[l][r] * scale;
        }
    }
}

void train(Net &net, const std::vector<Vec> &xs, const std::vector<int> &labels,
           const std::vector<std::vector<size_t>> &orders, size_t batch, double lr) {
    for (const auto &order : orders) {
        for (size_t start = 0; start < order.size(); start += batch) {
            std::vector<Vec> bx;
            std::vector<int> by;
            for (size_t i = start; i < std::min(order.size(), start + batch); ++i) {
                bx.push_back(xs[order[i]]);
                by.push_back(labels[order[i]]);
            }
            sgd_step(net, bx, by, lr);
        }
    }
}

}  // namespace reference
