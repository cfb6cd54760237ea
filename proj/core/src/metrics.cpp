// SPDX-License-Identifier: Apache-2.0
#include "volsplat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssim_engine.hpp"

namespace volsplat {

double psnr(const Image& pred, const Image& gt) {
    require_same_shape(pred, gt, "psnr");
    if (pred.data.empty()) throw contract_error("psnr: empty image");
    double mse = 0.0;
    for (std::size_t k = 0; k < pred.data.size(); ++k) {
        double d = pred.data[k] - gt.data[k];
        mse += d * d;
    }
    mse /= static_cast<double>(pred.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& pred, const Image& gt) {
    require_same_shape(pred, gt, "ssim");
    if (pred.width < detail::kSsimMinDim || pred.height < detail::kSsimMinDim)
        throw contract_error("ssim: images must be at least 11x11");
    return detail::ssim_engine(pred, gt, nullptr);
}

Image affine_normalize(const Image& pred, const Image& gt) {
    require_same_shape(pred, gt, "affine_normalize");
    if (pred.data.empty()) throw contract_error("affine_normalize: empty image");
    double n = static_cast<double>(pred.data.size());
    double mp = 0.0, mg = 0.0;
    for (std::size_t k = 0; k < pred.data.size(); ++k) {
        mp += pred.data[k];
        mg += gt.data[k];
    }
    mp /= n;
    mg /= n;
    double vp = 0.0, vg = 0.0;
    for (std::size_t k = 0; k < pred.data.size(); ++k) {
        vp += (pred.data[k] - mp) * (pred.data[k] - mp);
        vg += (gt.data[k] - mg) * (gt.data[k] - mg);
    }
    double sp = std::sqrt(vp / n);
    double sg = std::sqrt(vg / n);

    Image out(pred.width, pred.height);
    // A constant image's two-pass variance is rounding noise, not signal;
    // treat it as zero so the output is the constant gt mean.
    bool flat = sp <= 1e-12 * std::max(1.0, std::abs(mp));
    double gain = flat ? 0.0 : sg / sp;
    for (std::size_t k = 0; k < pred.data.size(); ++k)
        out.data[k] = std::clamp((pred.data[k] - mp) * gain + mg, 0.0, 1.0);
    return out;
}

MetricReport aggregate_metrics(std::vector<SliceMetric> slices) {
    MetricReport rep;
    rep.slices = std::move(slices);
    double psum = 0.0, ssum = 0.0;
    for (const SliceMetric& m : rep.slices) {
        int a = axis_index(m.axis);
        rep.axis_psnr[a] += m.psnr_db;
        rep.axis_ssim[a] += m.ssim;
        rep.axis_count[a] += 1;
        psum += m.psnr_db;
        ssum += m.ssim;
    }
    for (int a = 0; a < 3; ++a) {
        if (rep.axis_count[a] > 0) {
            rep.axis_psnr[a] /= rep.axis_count[a];
            rep.axis_ssim[a] /= rep.axis_count[a];
        } else {
            rep.axis_psnr[a] = std::numeric_limits<double>::quiet_NaN();
            rep.axis_ssim[a] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    if (!rep.slices.empty()) {
        rep.mean_psnr = psum / static_cast<double>(rep.slices.size());
        rep.mean_ssim = ssum / static_cast<double>(rep.slices.size());
    } else {
        rep.mean_psnr = std::numeric_limits<double>::quiet_NaN();
        rep.mean_ssim = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

} // namespace volsplat
