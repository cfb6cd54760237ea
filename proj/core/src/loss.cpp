// SPDX-License-Identifier: Apache-2.0
#include "volsplat/loss.hpp"

#include <cmath>

#include "ssim_engine.hpp"

namespace volsplat {

LossResult compute_loss(const Image& pred, const Image& gt, double ssim_weight) {
    require_same_shape(pred, gt, "compute_loss");
    if (pred.data.empty()) throw contract_error("compute_loss: empty image");
    if (!(ssim_weight >= 0.0 && ssim_weight <= 1.0))
        throw contract_error("compute_loss: ssim_weight must be in [0,1]");

    LossResult out;
    out.dimage = Image(pred.width, pred.height);
    double n = static_cast<double>(pred.data.size());
    double l1 = 0.0;
    double l1_w = 1.0 - ssim_weight;
    for (std::size_t k = 0; k < pred.data.size(); ++k) {
        double d = pred.data[k] - gt.data[k];
        l1 += std::abs(d);
        // Subgradient 0 at the kink.
        out.dimage.data[k] = l1_w * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / n;
    }
    out.value = l1_w * (l1 / n);

    if (ssim_weight > 0.0) {
        Image dssim;
        double s = detail::ssim_engine(pred, gt, &dssim);
        out.value += ssim_weight * (1.0 - s);
        for (std::size_t k = 0; k < pred.data.size(); ++k)
            out.dimage.data[k] -= ssim_weight * dssim.data[k];
    }
    return out;
}

} // namespace volsplat
