// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "volsplat/types.hpp"
#include "volsplat/volume.hpp"

namespace volsplat {

enum class PhantomKind { nested_ellipsoids, checker_shells };

// One ellipsoid boundary. A world point x is inside when
// |diag(1/semi_axes) * R^T * (x - center)| <= 1.
struct EllipsoidShell {
    Vec3 center = Vec3::Zero();
    Vec3 semi_axes = Vec3::Ones();
    Mat3 rotation = Mat3::Identity(); // columns are the ellipsoid's axes
    double intensity = 0.5;           // value between this boundary and the next inner one
};

// Everything needed to evaluate a phantom analytically at any world point.
// Exposed so tests can re-derive voxel values from first principles instead
// of trusting the rasterized volume.
struct PhantomParams {
    PhantomKind kind = PhantomKind::nested_ellipsoids;
    int nx = 0, ny = 0, nz = 0;
    std::uint32_t seed = 0;

    double background = 0.05;

    // nested_ellipsoids: shells ordered outermost -> innermost, all sharing
    // center and orientation with strictly shrinking semi-axes so nesting is
    // exact. A low-amplitude linear ramp is added everywhere EXCEPT inside
    // the innermost shell, which keeps the innermost region (and so the
    // center voxel) at exactly its configured intensity.
    std::vector<EllipsoidShell> shells;
    double gradient_amp = 0.0;
    Vec3 gradient_dir = Vec3::UnitX(); // unit vector

    // checker_shells: concentric spherical bands around `shell_center` of
    // width `band_width` alternate between band_hi and band_lo out to
    // `outer_radius`; a 3D checkerboard of period `checker_period` (cell
    // parity at (x + offset) / period) adds +/- checker_amp inside that
    // radius. Outside is plain background.
    Vec3 shell_center = Vec3::Zero();
    double band_width = 0.0;
    double outer_radius = 0.0;
    double band_hi = 0.75;
    double band_lo = 0.3;
    double checker_period = 4.0;
    double checker_amp = 0.05;
    Vec3 checker_offset = Vec3::Zero();
};

// Deterministic parameter draw for (kind, dims, seed). Same inputs produce
// bitwise-identical parameters. Throws config_error when any dim < 16.
PhantomParams phantom_params(PhantomKind kind, int nx, int ny, int nz, std::uint32_t seed);

// Analytic phantom value at a world point, in [0, 1].
double phantom_value(const PhantomParams& params, const Vec3& world);

// Samples phantom_value at every voxel center. Deterministic: same
// (kind, dims, seed) gives a bitwise-identical volume.
Volume make_phantom(PhantomKind kind, int nx, int ny, int nz, std::uint32_t seed);
Volume make_phantom(const PhantomParams& params);

} // namespace volsplat
