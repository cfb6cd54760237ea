// SPDX-License-Identifier: Apache-2.0
#include "volsplat/rasterizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "render_detail.hpp"
#include "splat_detail.hpp"
#include "volsplat/parallel.hpp"

namespace volsplat {

void ParamGrads::assign_zero(std::size_t n) {
    mean.assign(3 * n, 0.0);
    log_scale.assign(3 * n, 0.0);
    rotation.assign(4 * n, 0.0);
    opacity_raw.assign(n, 0.0);
    intensity_raw.assign(n, 0.0);
    mean_norm.assign(n, 0.0);
}

void ParamGrads::add(const ParamGrads& other) {
    if (other.size() != size())
        throw contract_error("ParamGrads::add: size mismatch");
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += other.mean[k];
    for (std::size_t k = 0; k < log_scale.size(); ++k) log_scale[k] += other.log_scale[k];
    for (std::size_t k = 0; k < rotation.size(); ++k) rotation[k] += other.rotation[k];
    for (std::size_t k = 0; k < opacity_raw.size(); ++k) opacity_raw[k] += other.opacity_raw[k];
    for (std::size_t k = 0; k < intensity_raw.size(); ++k)
        intensity_raw[k] += other.intensity_raw[k];
    for (std::size_t k = 0; k < mean_norm.size(); ++k) mean_norm[k] += other.mean_norm[k];
}

namespace detail {

AxisPrep make_axis_prep(const GaussianCloud& cloud, Axis axis, bool with_r_max) {
    cloud.check_consistent();
    std::size_t n = cloud.size();
    AxisPrep prep;
    prep.axis = axis;
    prep.with_r_max = with_r_max;
    prep.ag.resize(n);
    prep.alpha.resize(n);
    prep.color.resize(n);
    prep.mean.resize(3 * n);
    prep.amat.resize(6 * n);
    prep.rot.resize(9 * n);
    prep.scale.resize(3 * n);
    prep.dsgate.resize(3 * n);
    prep.qhat.resize(4 * n);
    prep.qnorm.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        Gaussian3D g = cloud.get(i);
        Mat3 sigma = build_covariance(g);
        prep.ag[i] = make_axis_gaussian(sigma, g.mean, axis);
        if (with_r_max) prep.ag[i].r_max = 3.0 * std::sqrt(max_eigenvalue(sigma));
        prep.alpha[i] = g.opacity();
        prep.color[i] = g.intensity();
        for (int k = 0; k < 3; ++k) prep.mean[3 * i + k] = g.mean[k];

        Mat3 a = sigma.inverse();
        prep.amat[6 * i + 0] = a(0, 0);
        prep.amat[6 * i + 1] = a(0, 1);
        prep.amat[6 * i + 2] = a(0, 2);
        prep.amat[6 * i + 3] = a(1, 1);
        prep.amat[6 * i + 4] = a(1, 2);
        prep.amat[6 * i + 5] = a(2, 2);

        Mat3 r = quaternion_to_rotation(g.rotation);
        for (int rr = 0; rr < 3; ++rr)
            for (int cc = 0; cc < 3; ++cc) prep.rot[9 * i + 3 * rr + cc] = r(rr, cc);
        Vec3 s = g.scales();
        for (int k = 0; k < 3; ++k) {
            double e = std::exp(g.log_scale[k]);
            prep.scale[3 * i + k] = s[k];
            prep.dsgate[3 * i + k] = e > kScaleFloor ? e : 0.0;
        }
        prep.qnorm[i] = g.rotation.norm();
        Vec4 qh = g.rotation / prep.qnorm[i];
        for (int k = 0; k < 4; ++k) prep.qhat[4 * i + k] = qh[k];
    }
    return prep;
}

TileBins bin_prepared(const AxisPrep& prep, const SliceSpec& slice, const RenderOptions& opts) {
    slice.validate();
    if (opts.tile < 1) throw contract_error("bin_gaussians: tile must be >= 1");
    if (prep.axis != slice.axis)
        throw contract_error("bin_gaussians: prepared axis does not match slice");
    if (opts.method == SelectMethod::m1 && !prep.with_r_max)
        throw contract_error("bin_gaussians: prep lacks r_max for method m1");

    TileBins bins;
    bins.tile = opts.tile;
    bins.width = slice.width;
    bins.height = slice.height;
    bins.tiles_u = (slice.width + opts.tile - 1) / opts.tile;
    bins.tiles_v = (slice.height + opts.tile - 1) / opts.tile;
    bins.lists.assign(static_cast<std::size_t>(bins.tiles_u) * bins.tiles_v, {});

    std::size_t n = prep.size();
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        CandidateBox box = opts.method == SelectMethod::m1
                               ? axis_bbox_m1(prep.ag[i], slice)
                               : axis_bbox_m2(prep.ag[i], slice, opts.epsilon, opts.mode);
        if (box.empty) continue;
        bins.active.push_back(static_cast<std::uint32_t>(i));
        dist[i] = std::abs(prep.ag[i].mu_t - slice.t);
        int tu0 = box.u_min / opts.tile, tu1 = box.u_max / opts.tile;
        int tv0 = box.v_min / opts.tile, tv1 = box.v_max / opts.tile;
        for (int tv = tv0; tv <= tv1; ++tv)
            for (int tu = tu0; tu <= tu1; ++tu)
                bins.lists[static_cast<std::size_t>(tv) * bins.tiles_u + tu].push_back(
                    static_cast<std::uint32_t>(i));
    }
    for (auto& list : bins.lists)
        std::sort(list.begin(), list.end(), [&dist](std::uint32_t a, std::uint32_t b) {
            return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
        });
    return bins;
}

namespace {

// Per-slice per-Gaussian cache: marginal density and conditional center.
struct SliceView {
    double m = 0, cu = 0, cv = 0;
};

std::vector<SliceView> make_slice_view(const AxisPrep& prep, const TileBins& bins, double t) {
    std::vector<SliceView> sview(prep.size());
    for (std::uint32_t gi : bins.active) {
        const AxisGaussian& ag = prep.ag[gi];
        double dt = t - ag.mu_t;
        sview[gi] = {axis_marginal(ag, t), ag.mu_u + ag.slope_u * dt, ag.mu_v + ag.slope_v * dt};
    }
    return sview;
}

// Identical arithmetic to axis_density with the depth-only parts hoisted.
inline double view_density(const AxisGaussian& ag, const SliceView& sv, double u, double v) {
    double du = u - sv.cu;
    double dv = v - sv.cv;
    if (ag.point_support)
        return du * du + dv * dv <= kPointSupportTol * kPointSupportTol ? sv.m : 0.0;
    double q = ag.ia * du * du + 2.0 * ag.ib * du * dv + ag.ic * dv * dv;
    return sv.m * std::exp(-0.5 * q);
}

void check_bins_match(const TileBins& bins, const SliceSpec& slice) {
    if (bins.width != slice.width || bins.height != slice.height || bins.tile < 1 ||
        bins.tiles_u != (slice.width + bins.tile - 1) / bins.tile ||
        bins.tiles_v != (slice.height + bins.tile - 1) / bins.tile)
        throw contract_error("rasterizer: bins were not built for this slice");
}

} // namespace

RenderedSlice render_prepared(const AxisPrep& prep, const SliceSpec& slice, const TileBins& bins,
                              const RenderOptions& opts) {
    slice.validate();
    check_bins_match(bins, slice);
    RenderedSlice out;
    out.image = Image(slice.width, slice.height);
    out.final_transmittance = Image(slice.width, slice.height, 1.0);

    std::vector<SliceView> sview = make_slice_view(prep, bins, slice.t);
    std::size_t ntiles = bins.lists.size();
    parallel_chunks(ntiles, resolve_threads(opts.threads), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t ti = b; ti < e; ++ti) {
            const auto& list = bins.lists[ti];
            int tu = static_cast<int>(ti % bins.tiles_u);
            int tv = static_cast<int>(ti / bins.tiles_u);
            int u0 = tu * bins.tile, u1 = std::min(slice.width, u0 + bins.tile);
            int v0 = tv * bins.tile, v1 = std::min(slice.height, v0 + bins.tile);
            for (int v = v0; v < v1; ++v) {
                double vw = slice.pixel_v(v);
                for (int u = u0; u < u1; ++u) {
                    double uw = slice.pixel_u(u);
                    double acc = 0.0, t = 1.0;
                    for (std::uint32_t gi : list) {
                        double p = view_density(prep.ag[gi], sview[gi], uw, vw);
                        double w = p * prep.alpha[gi];
                        if (w <= 0.0) continue;
                        acc += t * w * prep.color[gi];
                        t *= 1.0 - w;
                        if (opts.early_stop > 0.0 && t < opts.early_stop) break;
                    }
                    out.image.at(u, v) = acc;
                    out.final_transmittance.at(u, v) = t;
                }
            }
        }
    });
    return out;
}

void backward_prepared(const AxisPrep& prep, const SliceSpec& slice, const TileBins& bins,
                       const Image& dL_dimage, const RenderOptions& opts, RenderScratch& scratch,
                       ParamGrads& grads) {
    slice.validate();
    check_bins_match(bins, slice);
    if (dL_dimage.width != slice.width || dL_dimage.height != slice.height)
        throw contract_error("render_backward: dL_dimage shape does not match slice");
    std::size_t n = prep.size();
    if (grads.size() != n) throw contract_error("render_backward: grads not sized to cloud");
    scratch.ensure(n);

    std::vector<SliceView> sview = make_slice_view(prep, bins, slice.t);
    auto perm = axis_permutation(slice.axis);

    for (std::size_t ti = 0; ti < bins.lists.size(); ++ti) {
        const auto& list = bins.lists[ti];
        if (list.empty()) continue;
        int tu = static_cast<int>(ti % bins.tiles_u);
        int tv = static_cast<int>(ti / bins.tiles_u);
        int u0 = tu * bins.tile, u1 = std::min(slice.width, u0 + bins.tile);
        int v0 = tv * bins.tile, v1 = std::min(slice.height, v0 + bins.tile);
        for (int v = v0; v < v1; ++v) {
            double vw = slice.pixel_v(v);
            for (int u = u0; u < u1; ++u) {
                double gpix = dL_dimage.at(u, v);
                if (gpix == 0.0) continue;
                double uw = slice.pixel_u(u);

                // Forward recompute, recording only contributing Gaussians.
                scratch.entries.clear();
                double t = 1.0;
                for (std::uint32_t gi : list) {
                    double p = view_density(prep.ag[gi], sview[gi], uw, vw);
                    double w = p * prep.alpha[gi];
                    if (w <= 0.0) continue;
                    scratch.entries.push_back({gi, p, w, t});
                    t *= 1.0 - w;
                    if (opts.early_stop > 0.0 && t < opts.early_stop) break;
                }

                // World-space pixel position for density gradients.
                Vec3 x;
                x[perm[0]] = uw;
                x[perm[1]] = vw;
                x[perm[2]] = slice.t;

                // Back-to-front: S holds the suffix sum of contributions made
                // after entry k, so dI/dw_k = c_k T_k - S / (1 - w_k).
                double suffix = 0.0;
                for (std::size_t k = scratch.entries.size(); k-- > 0;) {
                    const CompositeEntry& en = scratch.entries[k];
                    std::uint32_t gi = en.idx;
                    double om = 1.0 - en.w;
                    double dIdw = prep.color[gi] * en.t - (om > 0.0 ? suffix / om : 0.0);
                    double dLdw = gpix * dIdw;
                    scratch.gcolor[gi] += gpix * en.w * en.t;
                    scratch.galpha[gi] += dLdw * en.p;
                    suffix += prep.color[gi] * en.w * en.t;

                    double dLdp = dLdw * prep.alpha[gi];
                    if (dLdp == 0.0 || prep.ag[gi].point_support) continue;
                    const double* a = &prep.amat[6 * gi];
                    double d0 = x[0] - prep.mean[3 * gi + 0];
                    double d1 = x[1] - prep.mean[3 * gi + 1];
                    double d2 = x[2] - prep.mean[3 * gi + 2];
                    double y0 = a[0] * d0 + a[1] * d1 + a[2] * d2;
                    double y1 = a[1] * d0 + a[3] * d1 + a[4] * d2;
                    double y2 = a[2] * d0 + a[4] * d1 + a[5] * d2;
                    double s = dLdp * en.p; // d p / d mu = p * A d; d p / d Sigma = p/2 y y^T
                    scratch.gmu[3 * gi + 0] += s * y0;
                    scratch.gmu[3 * gi + 1] += s * y1;
                    scratch.gmu[3 * gi + 2] += s * y2;
                    double h = 0.5 * s;
                    scratch.gcov[6 * gi + 0] += h * y0 * y0;
                    scratch.gcov[6 * gi + 1] += h * y0 * y1;
                    scratch.gcov[6 * gi + 2] += h * y0 * y2;
                    scratch.gcov[6 * gi + 3] += h * y1 * y1;
                    scratch.gcov[6 * gi + 4] += h * y1 * y2;
                    scratch.gcov[6 * gi + 5] += h * y2 * y2;
                }
            }
        }
    }

    // Chain accumulated dL/dSigma through Sigma = R diag(s)^2 R^T and the
    // quaternion normalization; fold activations for opacity/intensity.
    for (std::uint32_t gi : bins.active) {
        double ao = prep.alpha[gi];
        double co = prep.color[gi];
        grads.opacity_raw[gi] += scratch.galpha[gi] * ao * (1.0 - ao);
        grads.intensity_raw[gi] += scratch.gcolor[gi] * co * (1.0 - co);

        double gm0 = scratch.gmu[3 * gi + 0];
        double gm1 = scratch.gmu[3 * gi + 1];
        double gm2 = scratch.gmu[3 * gi + 2];
        grads.mean[3 * gi + 0] += gm0;
        grads.mean[3 * gi + 1] += gm1;
        grads.mean[3 * gi + 2] += gm2;
        grads.mean_norm[gi] += std::sqrt(gm0 * gm0 + gm1 * gm1 + gm2 * gm2);

        const double* gc = &scratch.gcov[6 * gi];
        Mat3 g;
        g << gc[0], gc[1], gc[2], gc[1], gc[3], gc[4], gc[2], gc[4], gc[5];
        Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>> r(&prep.rot[9 * gi]);
        Vec3 s(prep.scale[3 * gi + 0], prep.scale[3 * gi + 1], prep.scale[3 * gi + 2]);
        Mat3 m = r * s.asDiagonal();
        Mat3 dm = 2.0 * g * m;
        for (int k = 0; k < 3; ++k)
            grads.log_scale[3 * gi + k] +=
                r.col(k).dot(dm.col(k)) * prep.dsgate[3 * gi + k];

        Mat3 dr = dm * s.asDiagonal();
        const double* q = &prep.qhat[4 * gi];
        double w = q[0], xq = q[1], yq = q[2], zq = q[3];
        Vec4 dqh;
        dqh[0] = 2.0 * (-zq * dr(0, 1) + yq * dr(0, 2) + zq * dr(1, 0) - xq * dr(1, 2) -
                        yq * dr(2, 0) + xq * dr(2, 1));
        dqh[1] = 2.0 * (yq * dr(0, 1) + zq * dr(0, 2) + yq * dr(1, 0) - 2.0 * xq * dr(1, 1) -
                        w * dr(1, 2) + zq * dr(2, 0) + w * dr(2, 1) - 2.0 * xq * dr(2, 2));
        dqh[2] = 2.0 * (-2.0 * yq * dr(0, 0) + xq * dr(0, 1) + w * dr(0, 2) + xq * dr(1, 0) +
                        zq * dr(1, 2) - w * dr(2, 0) + zq * dr(2, 1) - 2.0 * yq * dr(2, 2));
        dqh[3] = 2.0 * (-2.0 * zq * dr(0, 0) - w * dr(0, 1) + xq * dr(0, 2) + w * dr(1, 0) -
                        2.0 * zq * dr(1, 1) + yq * dr(1, 2) + xq * dr(2, 0) + yq * dr(2, 1));
        Vec4 qh(w, xq, yq, zq);
        Vec4 dq = (dqh - qh * qh.dot(dqh)) / prep.qnorm[gi];
        for (int k = 0; k < 4; ++k) grads.rotation[4 * gi + k] += dq[k];
    }

    // Leave the scratch zeroed for the next slice; only active entries were
    // written.
    for (std::uint32_t gi : bins.active) {
        for (int k = 0; k < 3; ++k) scratch.gmu[3 * gi + k] = 0.0;
        for (int k = 0; k < 6; ++k) scratch.gcov[6 * gi + k] = 0.0;
        scratch.galpha[gi] = 0.0;
        scratch.gcolor[gi] = 0.0;
    }
}

} // namespace detail

TileBins bin_gaussians(const GaussianCloud& cloud, const SliceSpec& slice, SelectMethod method,
                       double epsilon, int tile, BboxMode mode) {
    RenderOptions opts;
    opts.method = method;
    opts.mode = mode;
    opts.epsilon = epsilon;
    opts.tile = tile;
    return bin_gaussians(cloud, slice, opts);
}

TileBins bin_gaussians(const GaussianCloud& cloud, const SliceSpec& slice,
                       const RenderOptions& opts) {
    if (opts.method == SelectMethod::m2 && !(opts.epsilon > 0.0 && opts.epsilon < 1.0))
        throw config_error("bin_gaussians: epsilon must be in (0,1)");
    detail::AxisPrep prep =
        detail::make_axis_prep(cloud, slice.axis, opts.method == SelectMethod::m1);
    return detail::bin_prepared(prep, slice, opts);
}

RenderedSlice render_slice(const GaussianCloud& cloud, const SliceSpec& slice,
                           const TileBins& bins, const RenderOptions& opts) {
    detail::AxisPrep prep = detail::make_axis_prep(cloud, slice.axis, false);
    return detail::render_prepared(prep, slice, bins, opts);
}

ParamGrads render_backward(GaussianCloud& cloud, const SliceSpec& slice, const TileBins& bins,
                           const Image& dL_dimage, const RenderOptions& opts) {
    detail::AxisPrep prep = detail::make_axis_prep(cloud, slice.axis, false);
    detail::RenderScratch scratch;
    ParamGrads grads;
    grads.assign_zero(cloud.size());
    detail::backward_prepared(prep, slice, bins, dL_dimage, opts, scratch, grads);
    for (std::size_t i = 0; i < cloud.size(); ++i) cloud.grad_norm_sum[i] += grads.mean_norm[i];
    cloud.grad_norm_samples += 1;
    return grads;
}

} // namespace volsplat
