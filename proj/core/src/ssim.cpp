// SPDX-License-Identifier: Apache-2.0
#include "ssim_engine.hpp"

#include <array>
#include <cmath>

#include "volsplat/errors.hpp"

namespace volsplat::detail {

namespace {

std::array<double, 11> window_taps() {
    std::array<double, 11> w{};
    double sum = 0.0;
    for (int k = -kSsimHalf; k <= kSsimHalf; ++k) {
        w[k + kSsimHalf] = std::exp(-(k * k) / (2.0 * kSsimSigma * kSsimSigma));
        sum += w[k + kSsimHalf];
    }
    for (double& x : w) x /= sum;
    return w;
}

inline int reflect(int i, int n) { return i < 0 ? -i - 1 : (i >= n ? 2 * n - 1 - i : i); }

// out[v][u] = sum_k w[k] in[v][reflect(u+k-5)], then the same along v.
void blur(const Image& in, const std::array<double, 11>& w, Image& tmp, Image& out) {
    int width = in.width, height = in.height;
    for (int v = 0; v < height; ++v)
        for (int u = 0; u < width; ++u) {
            double acc = 0.0;
            for (int k = -kSsimHalf; k <= kSsimHalf; ++k)
                acc += w[k + kSsimHalf] * in.at(reflect(u + k, width), v);
            tmp.at(u, v) = acc;
        }
    for (int v = 0; v < height; ++v)
        for (int u = 0; u < width; ++u) {
            double acc = 0.0;
            for (int k = -kSsimHalf; k <= kSsimHalf; ++k)
                acc += w[k + kSsimHalf] * tmp.at(u, reflect(v + k, height));
            out.at(u, v) = acc;
        }
}

// Exact adjoint of blur: transpose of the column pass, then of the row pass.
void blur_adjoint(const Image& in, const std::array<double, 11>& w, Image& tmp, Image& out) {
    int width = in.width, height = in.height;
    tmp.data.assign(tmp.data.size(), 0.0);
    for (int v = 0; v < height; ++v)
        for (int u = 0; u < width; ++u) {
            double x = in.at(u, v);
            if (x == 0.0) continue;
            for (int k = -kSsimHalf; k <= kSsimHalf; ++k)
                tmp.at(u, reflect(v + k, height)) += w[k + kSsimHalf] * x;
        }
    out.data.assign(out.data.size(), 0.0);
    for (int v = 0; v < height; ++v)
        for (int u = 0; u < width; ++u) {
            double x = tmp.at(u, v);
            if (x == 0.0) continue;
            for (int k = -kSsimHalf; k <= kSsimHalf; ++k)
                out.at(reflect(u + k, width), v) += w[k + kSsimHalf] * x;
        }
}

} // namespace

double ssim_engine(const Image& pred, const Image& gt, Image* dpred) {
    require_same_shape(pred, gt, "ssim");
    if (pred.width < kSsimHalf + 1 || pred.height < kSsimHalf + 1)
        throw contract_error("ssim: image too small for the reflect-padded window");

    static const std::array<double, 11> w = window_taps();
    int width = pred.width, height = pred.height;
    std::size_t npix = pred.data.size();
    Image tmp(width, height), mx(width, height), my(width, height);
    Image sxx(width, height), syy(width, height), sxy(width, height);

    blur(pred, w, tmp, mx);
    blur(gt, w, tmp, my);
    Image prod(width, height);
    for (std::size_t k = 0; k < npix; ++k) prod.data[k] = pred.data[k] * pred.data[k];
    blur(prod, w, tmp, sxx);
    for (std::size_t k = 0; k < npix; ++k) prod.data[k] = gt.data[k] * gt.data[k];
    blur(prod, w, tmp, syy);
    for (std::size_t k = 0; k < npix; ++k) prod.data[k] = pred.data[k] * gt.data[k];
    blur(prod, w, tmp, sxy);

    // Central moments and the per-center SSIM map; accumulate the mean and,
    // if asked, the pieces of the chain rule.
    double total = 0.0;
    Image gmu, gsx, gsxy;
    if (dpred) {
        gmu = Image(width, height);
        gsx = Image(width, height);
        gsxy = Image(width, height);
    }
    for (std::size_t k = 0; k < npix; ++k) {
        double ux = mx.data[k], uy = my.data[k];
        double vx = sxx.data[k] - ux * ux;
        double vy = syy.data[k] - uy * uy;
        double vxy = sxy.data[k] - ux * uy;
        double a1 = 2.0 * ux * uy + kSsimC1;
        double a2 = 2.0 * vxy + kSsimC2;
        double b1 = ux * ux + uy * uy + kSsimC1;
        double b2 = vx + vy + kSsimC2;
        double inv = 1.0 / (b1 * b2);
        double s = a1 * a2 * inv;
        total += s;
        if (dpred) {
            gmu.data[k] = 2.0 * uy * a2 * inv - 2.0 * ux * s / b1;
            gsx.data[k] = -s / b2;
            gsxy.data[k] = 2.0 * a1 * inv;
        }
    }
    double value = total / static_cast<double>(npix);
    if (!dpred) return value;

    // d meanSSIM / d pred_p =
    //   (1/P) [ At(gmu) + 2 x At(gsx) - 2 At(gsx mx) + y At(gsxy) - At(gsxy my) ]
    // with At the blur adjoint; the x- and y-weighted terms come from the
    // central-moment derivatives d var_x = 2w (x - mu_x), d cov = w (y - mu_y).
    *dpred = Image(width, height);
    Image scat(width, height);
    blur_adjoint(gmu, w, tmp, scat);
    for (std::size_t k = 0; k < npix; ++k) dpred->data[k] = scat.data[k];
    blur_adjoint(gsx, w, tmp, scat);
    for (std::size_t k = 0; k < npix; ++k) dpred->data[k] += 2.0 * pred.data[k] * scat.data[k];
    for (std::size_t k = 0; k < npix; ++k) gsx.data[k] *= mx.data[k];
    blur_adjoint(gsx, w, tmp, scat);
    for (std::size_t k = 0; k < npix; ++k) dpred->data[k] -= 2.0 * scat.data[k];
    blur_adjoint(gsxy, w, tmp, scat);
    for (std::size_t k = 0; k < npix; ++k) dpred->data[k] += gt.data[k] * scat.data[k];
    for (std::size_t k = 0; k < npix; ++k) gsxy.data[k] *= my.data[k];
    blur_adjoint(gsxy, w, tmp, scat);
    for (std::size_t k = 0; k < npix; ++k) dpred->data[k] -= scat.data[k];
    double invp = 1.0 / static_cast<double>(npix);
    for (std::size_t k = 0; k < npix; ++k) dpred->data[k] *= invp;
    return value;
}

} // namespace volsplat::detail
