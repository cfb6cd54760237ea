// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>

#include "volsplat/errors.hpp"

namespace volsplat {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

enum class Axis : int { x = 0, y = 1, z = 2 };

inline int axis_index(Axis a) { return static_cast<int>(a); }

// Cyclic in-slice axes for a slicing axis a: (u, v, t) = (a+1, a+2, a).
// Slicing along z keeps (x, y) as image axes.
inline std::array<int, 3> axis_permutation(Axis a) {
    int t = axis_index(a);
    return {(t + 1) % 3, (t + 2) % 3, t};
}

// Axis-aligned world box.
struct Box3 {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    Vec3 extent() const { return hi - lo; }
    double max_extent() const { return extent().maxCoeff(); }
    Vec3 center() const { return 0.5 * (lo + hi); }

    bool contains(const Vec3& p) const {
        return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() &&
               p.y() <= hi.y() && p.z() >= lo.z() && p.z() <= hi.z();
    }
    // Box grown by `frac` of its extent on every side.
    Box3 expanded(double frac) const {
        Vec3 pad = frac * extent();
        return {lo - pad, hi + pad};
    }
    bool valid() const {
        return lo.allFinite() && hi.allFinite() && (hi.array() >= lo.array()).all();
    }
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double inverse_sigmoid(double y) {
    if (!(y > 0.0 && y < 1.0))
        throw contract_error("inverse_sigmoid: argument must be in (0,1)");
    return std::log(y / (1.0 - y));
}

} // namespace volsplat
