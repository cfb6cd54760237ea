// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "volsplat/types.hpp"

namespace volsplat {

// Geometry of one axis-aligned slice plane. (u, v) are the in-plane axes in
// the cyclic frame of `axis` (see axis_permutation); origin_* is the world
// coordinate of pixel (0, 0)'s center and pixels are square with side
// `pitch`. t is the world depth of the plane along `axis`.
struct SliceSpec {
    Axis axis = Axis::z;
    double t = 0.0;
    int width = 0;
    int height = 0;
    double origin_u = 0.0;
    double origin_v = 0.0;
    double pitch = 1.0;

    double pixel_u(int u) const { return origin_u + u * pitch; }
    double pixel_v(int v) const { return origin_v + v * pitch; }

    // World position of a pixel center, mapped back from the (u, v, t) frame.
    Vec3 world_point(int u, int v) const {
        auto perm = axis_permutation(axis);
        Vec3 p;
        p[perm[0]] = pixel_u(u);
        p[perm[1]] = pixel_v(v);
        p[perm[2]] = t;
        return p;
    }

    void validate() const {
        if (width < 1 || height < 1)
            throw contract_error("SliceSpec: width and height must be >= 1");
        if (!(pitch > 0.0) || !std::isfinite(pitch) || !std::isfinite(t) ||
            !std::isfinite(origin_u) || !std::isfinite(origin_v))
            throw contract_error("SliceSpec: geometry must be finite with pitch > 0");
    }
};

// Closed pixel index range; empty() when no pixel qualifies.
struct PixelRange {
    int lo = 0;
    int hi = -1;
    bool empty() const { return hi < lo; }
    int count() const { return empty() ? 0 : hi - lo + 1; }
};

// Pixels whose cells intersect the world interval [w_lo, w_hi], i.e. centers
// within the interval dilated by half a pixel. Clamped to [0, n).
PixelRange pixels_touching(double w_lo, double w_hi, double origin, double pitch, int n);

// Pixels whose centers lie inside [w_lo, w_hi] (no dilation). Clamped.
PixelRange pixels_inside(double w_lo, double w_hi, double origin, double pitch, int n);

} // namespace volsplat
