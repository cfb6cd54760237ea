// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>

#include "volsplat/gaussian.hpp"
#include "volsplat/slice.hpp"
#include "volsplat/types.hpp"

namespace volsplat {

// Below this determinant the conditional covariance is treated as a point
// support (only reachable near the scale floor).
inline constexpr double kSingularDet = 1e-20;
// World-units tolerance for hitting a point support exactly.
inline constexpr double kPointSupportTol = 1e-6;

// 1D density of the cloud along the slicing axis.
struct Marginal1D {
    double mu_t = 0.0;
    double var_t = 0.0;
};

// In-plane distribution of a Gaussian restricted to a fixed depth. The mean
// shifts linearly with the depth offset; the covariance is the Schur
// complement of the depth entry and does not depend on t.
struct Conditional2D {
    Vec2 mu_uv = Vec2::Zero();
    Mat2 cov_uv = Mat2::Zero();
};

// Candidate pixel rectangle on a slice, closed indices, clamped.
struct CandidateBox {
    int u_min = 0, u_max = -1;
    int v_min = 0, v_max = -1;
    bool empty = true;

    long long area() const {
        return empty ? 0
                     : static_cast<long long>(u_max - u_min + 1) *
                           static_cast<long long>(v_max - v_min + 1);
    }
    bool contains(int u, int v) const {
        return !empty && u >= u_min && u <= u_max && v >= v_min && v <= v_max;
    }
    bool contains_box(const CandidateBox& o) const {
        return o.empty || (!empty && o.u_min >= u_min && o.u_max <= u_max &&
                           o.v_min >= v_min && o.v_max <= v_max);
    }
};

enum class BboxMode {
    exact,  // threshold-derived radius; candidate box covers the full support
    capped3 // radius truncated at Mahalanobis 3; admits boundary misses
};

// Reorders coordinates so the slicing axis comes last: (u, v, t) with
// u = axis+1, v = axis+2 (cyclic). Sigma' is the permutation similarity.
std::pair<Mat3, Vec3> permute_for_axis(const Mat3& sigma, const Vec3& mu, Axis axis);

// Marginal along `axis` and its unnormalized density at t.
std::pair<Marginal1D, double> marginal(const Gaussian3D& g, Axis axis, double t);

// Conditional in-plane distribution at depth t.
Conditional2D condition_on_depth(const Gaussian3D& g, Axis axis, double t);

// marginal(t) * conditional(u, v | t). Equals the direct 3D density (the
// factorization is exact for Gaussians); singular conditional covariance
// falls back to point support.
double factorized_density(const Gaussian3D& g, double u, double v, double t, Axis axis);

// Axis-aligned half extents of the ellipse {d^T cov^{-1} d <= r^2}:
// r * sqrt(diag(cov)). For singular cov this is still the correct (possibly
// degenerate) extent of the level set.
Vec2 ellipse_half_extent(const Mat2& cov_uv, double r);

// Depth-independent candidate square from the bounding sphere of the 3x
// scaled ellipsoid: half edge 3*sqrt(lambda_max), same box for every slice
// the sphere meets, empty beyond it. Pixel selection keeps every pixel whose
// cell touches the square.
CandidateBox bbox_method1(const Gaussian3D& g, const SliceSpec& slice);

// Per-slice adapted candidate box. Empty when the marginal is <= epsilon;
// otherwise the axis-aligned extent of the conditional ellipse at Mahalanobis
// radius r = sqrt(2 ln(m/epsilon)). Exact mode keeps every pixel whose cell
// touches the extent (no false negatives anywhere); capped3 truncates r at 3
// and keeps only pixels whose centers are inside, reproducing the small
// boundary miss rate of the fixed-3-sigma convention.
CandidateBox bbox_method2(const Gaussian3D& g, const SliceSpec& slice, double epsilon,
                          BboxMode mode = BboxMode::exact);

} // namespace volsplat
