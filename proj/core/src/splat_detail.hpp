// SPDX-License-Identifier: Apache-2.0
//
// Shared per-axis Gaussian quantities. Both the one-shot public operations
// and the rasterizer's prepared path route through these functions, so a
// candidate box computed from a prepared cloud is bitwise identical to one
// computed from the standalone entry points.
#pragma once

#include <cmath>

#include "volsplat/conditional.hpp"
#include "volsplat/slice.hpp"

namespace volsplat::detail {

// Everything depth-independent about one Gaussian viewed along one axis.
struct AxisGaussian {
    double mu_u = 0, mu_v = 0, mu_t = 0;
    double var_t = 1, inv_var_t = 1;
    double cross_u = 0, cross_v = 0; // covariance between (u,v) and t
    double slope_u = 0, slope_v = 0; // conditional center shift per unit depth offset
    double ca = 1, cb = 0, cc = 1;   // conditional covariance entries
    double ia = 1, ib = 0, ic = 1;   // inverse conditional covariance
    double half_u = 1, half_v = 1;   // ellipse half extent per unit Mahalanobis radius
    bool point_support = false;
    double r_max = 0; // method-1 sphere radius; filled only when requested
};

inline AxisGaussian make_axis_gaussian(const Mat3& sigma, const Vec3& mu, Axis axis) {
    auto perm = axis_permutation(axis);
    AxisGaussian ag;
    ag.mu_u = mu[perm[0]];
    ag.mu_v = mu[perm[1]];
    ag.mu_t = mu[perm[2]];
    ag.var_t = sigma(perm[2], perm[2]);
    ag.inv_var_t = 1.0 / ag.var_t;
    ag.cross_u = sigma(perm[0], perm[2]);
    ag.cross_v = sigma(perm[1], perm[2]);
    ag.slope_u = ag.cross_u * ag.inv_var_t;
    ag.slope_v = ag.cross_v * ag.inv_var_t;
    ag.ca = sigma(perm[0], perm[0]) - ag.cross_u * ag.cross_u * ag.inv_var_t;
    ag.cb = sigma(perm[0], perm[1]) - ag.cross_u * ag.cross_v * ag.inv_var_t;
    ag.cc = sigma(perm[1], perm[1]) - ag.cross_v * ag.cross_v * ag.inv_var_t;
    double det = ag.ca * ag.cc - ag.cb * ag.cb;
    if (det < kSingularDet) {
        ag.point_support = true;
        ag.ia = ag.ib = ag.ic = 0.0;
        ag.half_u = ag.half_v = 0.0;
    } else {
        double inv_det = 1.0 / det;
        ag.ia = ag.cc * inv_det;
        ag.ib = -ag.cb * inv_det;
        ag.ic = ag.ca * inv_det;
        ag.half_u = std::sqrt(std::max(ag.ca, 0.0));
        ag.half_v = std::sqrt(std::max(ag.cc, 0.0));
    }
    return ag;
}

inline double axis_marginal(const AxisGaussian& ag, double t) {
    double d = t - ag.mu_t;
    return std::exp(-0.5 * d * d * ag.inv_var_t);
}

// Factorized density at world in-plane coordinates (u, v) and depth t.
inline double axis_density(const AxisGaussian& ag, double u, double v, double t) {
    double m = axis_marginal(ag, t);
    double dt = t - ag.mu_t;
    double du = u - (ag.mu_u + ag.slope_u * dt);
    double dv = v - (ag.mu_v + ag.slope_v * dt);
    if (ag.point_support)
        return du * du + dv * dv <= kPointSupportTol * kPointSupportTol ? m : 0.0;
    double q = ag.ia * du * du + 2.0 * ag.ib * du * dv + ag.ic * dv * dv;
    return m * std::exp(-0.5 * q);
}

inline CandidateBox box_from_ranges(const PixelRange& us, const PixelRange& vs) {
    CandidateBox box;
    if (us.empty() || vs.empty()) return box;
    box.empty = false;
    box.u_min = us.lo;
    box.u_max = us.hi;
    box.v_min = vs.lo;
    box.v_max = vs.hi;
    return box;
}

// Method-1 candidate square; ag.r_max must be populated.
inline CandidateBox axis_bbox_m1(const AxisGaussian& ag, const SliceSpec& slice) {
    if (std::abs(slice.t - ag.mu_t) > ag.r_max) return {};
    return box_from_ranges(pixels_touching(ag.mu_u - ag.r_max, ag.mu_u + ag.r_max,
                                           slice.origin_u, slice.pitch, slice.width),
                           pixels_touching(ag.mu_v - ag.r_max, ag.mu_v + ag.r_max,
                                           slice.origin_v, slice.pitch, slice.height));
}

// Method-2 adapted box; see bbox_method2 for the two modes.
inline CandidateBox axis_bbox_m2(const AxisGaussian& ag, const SliceSpec& slice,
                                 double epsilon, BboxMode mode) {
    double m = axis_marginal(ag, slice.t);
    if (m <= epsilon) return {};
    double r = std::sqrt(2.0 * std::log(m / epsilon));
    if (mode == BboxMode::capped3) r = std::min(r, 3.0);
    double dt = slice.t - ag.mu_t;
    double cu = ag.mu_u + ag.slope_u * dt;
    double cv = ag.mu_v + ag.slope_v * dt;
    double hu = ag.point_support ? 0.0 : r * ag.half_u;
    double hv = ag.point_support ? 0.0 : r * ag.half_v;
    if (mode == BboxMode::exact)
        return box_from_ranges(
            pixels_touching(cu - hu, cu + hu, slice.origin_u, slice.pitch, slice.width),
            pixels_touching(cv - hv, cv + hv, slice.origin_v, slice.pitch, slice.height));
    return box_from_ranges(
        pixels_inside(cu - hu, cu + hu, slice.origin_u, slice.pitch, slice.width),
        pixels_inside(cv - hv, cv + hv, slice.origin_v, slice.pitch, slice.height));
}

} // namespace volsplat::detail
