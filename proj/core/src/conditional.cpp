// SPDX-License-Identifier: Apache-2.0
#include "volsplat/conditional.hpp"

#include <cmath>

#include "splat_detail.hpp"
#include "volsplat/gaussian.hpp"

namespace volsplat {

std::pair<Mat3, Vec3> permute_for_axis(const Mat3& sigma, const Vec3& mu, Axis axis) {
    auto perm = axis_permutation(axis);
    Mat3 sp;
    Vec3 mp;
    for (int i = 0; i < 3; ++i) {
        mp[i] = mu[perm[i]];
        for (int j = 0; j < 3; ++j) sp(i, j) = sigma(perm[i], perm[j]);
    }
    return {sp, mp};
}

std::pair<Marginal1D, double> marginal(const Gaussian3D& g, Axis axis, double t) {
    detail::AxisGaussian ag = detail::make_axis_gaussian(build_covariance(g), g.mean, axis);
    return {Marginal1D{ag.mu_t, ag.var_t}, detail::axis_marginal(ag, t)};
}

Conditional2D condition_on_depth(const Gaussian3D& g, Axis axis, double t) {
    detail::AxisGaussian ag = detail::make_axis_gaussian(build_covariance(g), g.mean, axis);
    double dt = t - ag.mu_t;
    Conditional2D c;
    c.mu_uv = Vec2(ag.mu_u + ag.slope_u * dt, ag.mu_v + ag.slope_v * dt);
    c.cov_uv << ag.ca, ag.cb, ag.cb, ag.cc;
    return c;
}

double factorized_density(const Gaussian3D& g, double u, double v, double t, Axis axis) {
    detail::AxisGaussian ag = detail::make_axis_gaussian(build_covariance(g), g.mean, axis);
    return detail::axis_density(ag, u, v, t);
}

Vec2 ellipse_half_extent(const Mat2& cov_uv, double r) {
    return r * cov_uv.diagonal().cwiseMax(0.0).cwiseSqrt();
}

CandidateBox bbox_method1(const Gaussian3D& g, const SliceSpec& slice) {
    slice.validate();
    Mat3 sigma = build_covariance(g);
    detail::AxisGaussian ag = detail::make_axis_gaussian(sigma, g.mean, slice.axis);
    ag.r_max = 3.0 * std::sqrt(max_eigenvalue(sigma));
    return detail::axis_bbox_m1(ag, slice);
}

CandidateBox bbox_method2(const Gaussian3D& g, const SliceSpec& slice, double epsilon,
                          BboxMode mode) {
    slice.validate();
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw config_error("bbox_method2: epsilon must be in (0,1)");
    detail::AxisGaussian ag = detail::make_axis_gaussian(build_covariance(g), g.mean, slice.axis);
    return detail::axis_bbox_m2(ag, slice, epsilon, mode);
}

} // namespace volsplat
