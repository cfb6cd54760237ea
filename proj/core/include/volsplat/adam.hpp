// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "volsplat/errors.hpp"

namespace volsplat {

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam state for one parameter group. Parameters live in float32 arrays (the
// cloud's storage); moments and all arithmetic are double. The step counter
// advances once per step() call, so call it exactly once per training step.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t t = 0;

    // p[i] -= lr * mhat / (sqrt(vhat) + eps), with bias-corrected moments.
    void step(std::vector<float>& params, const std::vector<double>& grads, double lr,
              const AdamParams& cfg = {});

    // Rebuild moments for a re-indexed parameter set: entry i of the new
    // state takes the moments of old entry src[i], or zeros when src[i] < 0
    // (a freshly created parameter). stride = parameters per entry. The step
    // count is preserved so bias correction keeps its schedule.
    void remap(const std::vector<std::int64_t>& src, int stride);
};

} // namespace volsplat
