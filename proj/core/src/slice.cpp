// SPDX-License-Identifier: Apache-2.0
#include "volsplat/slice.hpp"

#include <algorithm>
#include <cmath>

namespace volsplat {

namespace {

// A hair of slack so interval endpoints that land exactly on a pixel center
// (or cell edge) are kept rather than dropped to floating point noise.
constexpr double kEdgeSlack = 1e-9;

PixelRange clamp_range(double s_lo, double s_hi, int n) {
    PixelRange r;
    if (!(s_hi >= s_lo) || n < 1) return r; // also catches NaN
    int lo = static_cast<int>(std::ceil(s_lo - kEdgeSlack));
    int hi = static_cast<int>(std::floor(s_hi + kEdgeSlack));
    lo = std::max(lo, 0);
    hi = std::min(hi, n - 1);
    r.lo = lo;
    r.hi = hi;
    return r;
}

} // namespace

PixelRange pixels_touching(double w_lo, double w_hi, double origin, double pitch, int n) {
    if (w_hi < w_lo) return {};
    double s_lo = (w_lo - origin) / pitch - 0.5;
    double s_hi = (w_hi - origin) / pitch + 0.5;
    return clamp_range(s_lo, s_hi, n);
}

PixelRange pixels_inside(double w_lo, double w_hi, double origin, double pitch, int n) {
    if (w_hi < w_lo) return {};
    double s_lo = (w_lo - origin) / pitch;
    double s_hi = (w_hi - origin) / pitch;
    return clamp_range(s_lo, s_hi, n);
}

} // namespace volsplat
