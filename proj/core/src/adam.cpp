// SPDX-License-Identifier: Apache-2.0
#include "volsplat/adam.hpp"

#include <cmath>

namespace volsplat {

void AdamState::step(std::vector<float>& params, const std::vector<double>& grads, double lr,
                     const AdamParams& cfg) {
    if (params.size() != grads.size())
        throw contract_error("AdamState::step: parameter/gradient size mismatch");
    if (m.size() != params.size()) {
        if (!m.empty()) throw contract_error("AdamState::step: state sized for another array");
        m.assign(params.size(), 0.0);
        v.assign(params.size(), 0.0);
    }
    t += 1;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double g = grads[i];
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
        double mhat = m[i] / bc1;
        double vhat = v[i] / bc2;
        params[i] = static_cast<float>(static_cast<double>(params[i]) -
                                       lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
}

void AdamState::remap(const std::vector<std::int64_t>& src, int stride) {
    if (stride < 1) throw contract_error("AdamState::remap: stride must be >= 1");
    if (m.empty()) return; // never stepped: stay lazy, next step sizes fresh zeros
    std::size_t old_n = m.size() / static_cast<std::size_t>(stride);
    std::vector<double> nm(src.size() * static_cast<std::size_t>(stride), 0.0);
    std::vector<double> nv(nm.size(), 0.0);
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] < 0) continue;
        auto o = static_cast<std::size_t>(src[i]);
        if (o >= old_n) throw contract_error("AdamState::remap: source index out of range");
        for (int k = 0; k < stride; ++k) {
            nm[i * stride + k] = m[o * stride + k];
            nv[i * stride + k] = v[o * stride + k];
        }
    }
    m = std::move(nm);
    v = std::move(nv);
}

} // namespace volsplat
