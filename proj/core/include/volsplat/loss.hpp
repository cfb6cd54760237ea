// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "volsplat/image.hpp"
#include "volsplat/rasterizer.hpp"

namespace volsplat {

struct LossResult {
    double value = 0.0;
    Image dimage; // dL/dpred, same shape as the inputs
};

// L = (1 - w) * mean|pred - gt| + w * (1 - SSIM(pred, gt)), with the gradient
// of both terms computed analytically. w = 0 skips the SSIM term entirely
// (and with it the window-size requirement). Throws contract_error on shape
// mismatch or w outside [0,1].
LossResult compute_loss(const Image& pred, const Image& gt, double ssim_weight);

inline LossResult compute_loss(const RenderedSlice& pred, const Image& gt, double ssim_weight) {
    return compute_loss(pred.image, gt, ssim_weight);
}

} // namespace volsplat
