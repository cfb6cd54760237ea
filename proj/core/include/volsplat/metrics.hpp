// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "volsplat/image.hpp"
#include "volsplat/types.hpp"

namespace volsplat {

// 10 log10(1 / MSE) against a peak of 1.0 (data is normalized). Identical
// images return +infinity as the sentinel. Throws contract_error on shape
// mismatch.
double psnr(const Image& pred, const Image& gt);

// Mean local SSIM, 11x11 Gaussian window sigma 1.5, C1 = 0.01^2, C2 = 0.03^2,
// symmetric-reflect edge handling. Throws contract_error on shape mismatch or
// when min(width, height) < 11.
double ssim(const Image& pred, const Image& gt);

// (pred - mean(pred)) * (std(gt) / std(pred)) + mean(gt), clamped to [0,1].
// A constant pred maps to the constant mean(gt). Matching first and second
// moments undoes any positive-gain affine brightness distortion exactly
// (pre-clamp), and the map is idempotent.
Image affine_normalize(const Image& pred, const Image& gt);

struct SliceMetric {
    Axis axis = Axis::z;
    int index = 0;   // slice index along its axis
    double t = 0.0;  // world depth
    double psnr_db = 0.0;
    double ssim = 0.0;
};

// Per-slice values with per-axis and overall means. peak documents the PSNR
// reference maximum.
struct MetricReport {
    std::vector<SliceMetric> slices;
    double axis_psnr[3] = {0, 0, 0};
    double axis_ssim[3] = {0, 0, 0};
    int axis_count[3] = {0, 0, 0};
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    double peak = 1.0;
};

MetricReport aggregate_metrics(std::vector<SliceMetric> slices);

} // namespace volsplat
