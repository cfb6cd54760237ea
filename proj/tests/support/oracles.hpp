// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used to check the library. Each
// oracle deliberately takes a different computational route than the code
// under test: closed-form cubic roots instead of an iterative eigensolver,
// quaternion sandwich products instead of the rotation-matrix formula,
// Gaussian elimination instead of a precomputed inverse, all-pairs
// compositing instead of tile binning.
#pragma once

#include <vector>

#include "volsplat/conditional.hpp"
#include "volsplat/gaussian.hpp"
#include "volsplat/image.hpp"
#include "volsplat/rng.hpp"
#include "volsplat/slice.hpp"

namespace oracles {

using namespace volsplat;

// Largest eigenvalue of a symmetric 3x3 via the trigonometric solution of
// the characteristic cubic.
double cubic_max_eigenvalue(const Mat3& m);

// Density exp(-1/2 d^T Sigma^{-1} d) where Sigma is assembled by rotating
// the basis with quaternion sandwich products and the linear system is
// solved by hand-written Gaussian elimination with partial pivoting.
double elimination_density(const Gaussian3D& g, const Vec3& x);

// Brute-force compositing: every Gaussian, every pixel, globally sorted by
// (|mu_t - t|, index), evaluated with the direct 3D density. No binning.
// early_stop <= 0 disables early termination.
Image naive_render(const GaussianCloud& cloud, const SliceSpec& slice, double early_stop,
                   Image* transmittance = nullptr);

// Pixels whose center density meets `epsilon`, scanned densely.
std::vector<std::pair<int, int>> dense_support_scan(const Gaussian3D& g,
                                                    const SliceSpec& slice, double epsilon);

// Direct (non-separable, non-incremental) mean SSIM over an 11x11 Gaussian
// window, sigma 1.5, symmetric-reflect padding, C1 = 0.01^2, C2 = 0.03^2.
double reference_ssim(const Image& a, const Image& b);

// Random test Gaussian with means in `box`, per-axis sigma log-uniform in
// [sigma_lo, sigma_hi], random orientation, opacity/intensity in (0.05,0.95).
Gaussian3D random_gaussian(Rng& rng, const Box3& box, double sigma_lo, double sigma_hi);

GaussianCloud random_cloud(Rng& rng, std::size_t n, const Box3& box, double sigma_lo,
                           double sigma_hi);

} // namespace oracles
