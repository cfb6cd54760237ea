// SPDX-License-Identifier: Apache-2.0
//
// Windowed SSIM with an analytic gradient. The forward pass uses separable
// 11-tap Gaussian blurs with half-sample reflect padding; the backward pass
// applies the exact adjoint of those blurs (a scatter), so the gradient is
// correct at image borders too.
#pragma once

#include "volsplat/image.hpp"

namespace volsplat::detail {

inline constexpr int kSsimHalf = 5; // 11x11 window
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;
inline constexpr int kSsimMinDim = 2 * kSsimHalf + 1;

// Mean SSIM between pred and gt. Requires min(width, height) >= kSsimHalf + 1
// (single reflection must stay in range); callers enforce their own stricter
// contracts. If dpred is non-null it receives d(meanSSIM)/d(pred).
double ssim_engine(const Image& pred, const Image& gt, Image* dpred);

} // namespace volsplat::detail
