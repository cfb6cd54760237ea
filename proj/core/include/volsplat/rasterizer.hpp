// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "volsplat/conditional.hpp"
#include "volsplat/gaussian.hpp"
#include "volsplat/image.hpp"
#include "volsplat/slice.hpp"

namespace volsplat {

// Candidate selection: m1 = bounding sphere of the 3D Gaussian projected to a
// square; m2 = depth-adapted conditional ellipse box.
enum class SelectMethod { m1, m2 };

struct RenderOptions {
    SelectMethod method = SelectMethod::m2;
    BboxMode mode = BboxMode::exact;
    double epsilon = 0.01;    // marginal cutoff for m2
    int tile = 16;            // tile edge in pixels
    double early_stop = 1e-4; // stop compositing when transmittance drops below; <= 0 disables
    int threads = 1;          // 0 = hardware concurrency
};

struct RenderedSlice {
    Image image;               // composited intensities in [0,1]
    Image final_transmittance; // residual product term per pixel
};

// Per-tile candidate lists for one slice. Lists hold Gaussian indices sorted
// ascending by |mu_t - slice.t| with index as tiebreaker; a Gaussian is listed
// for a tile iff its candidate box intersects the tile. `active` is the
// ascending set of Gaussians with a nonempty box anywhere on the slice.
struct TileBins {
    int tile = 16;
    int tiles_u = 0;
    int tiles_v = 0;
    int width = 0;
    int height = 0;
    std::vector<std::vector<std::uint32_t>> lists; // tiles_u * tiles_v, row-major by tile
    std::vector<std::uint32_t> active;

    const std::vector<std::uint32_t>& at(int tu, int tv) const {
        return lists[static_cast<std::size_t>(tv) * tiles_u + tu];
    }
};

// Gradients with the same shapes as the cloud's parameter arrays, plus the
// per-Gaussian norm of the mean gradient contributed by this pass (the
// quantity accumulated for refinement decisions).
struct ParamGrads {
    std::vector<double> mean;          // 3N
    std::vector<double> log_scale;     // 3N
    std::vector<double> rotation;      // 4N
    std::vector<double> opacity_raw;   // N
    std::vector<double> intensity_raw; // N
    std::vector<double> mean_norm;     // N

    std::size_t size() const { return opacity_raw.size(); }
    void assign_zero(std::size_t n);
    void add(const ParamGrads& other);
};

TileBins bin_gaussians(const GaussianCloud& cloud, const SliceSpec& slice, SelectMethod method,
                       double epsilon, int tile, BboxMode mode = BboxMode::exact);
TileBins bin_gaussians(const GaussianCloud& cloud, const SliceSpec& slice,
                       const RenderOptions& opts);

// Front-to-back compositing of the binned candidates. Per pixel the tile's
// sorted list is walked accumulating T * p * alpha * c, multiplying
// T *= (1 - p * alpha) after each Gaussian and stopping early when T drops
// below opts.early_stop. Parallel over tiles; bitwise deterministic for any
// thread count.
RenderedSlice render_slice(const GaussianCloud& cloud, const SliceSpec& slice,
                           const TileBins& bins, const RenderOptions& opts = {});

// Analytic gradients of a scalar loss L given per-pixel derivatives dL_dimage.
// Recomputes the forward per-pixel state, then back-propagates through the
// compositing weights, factorized density, activations, covariance assembly,
// and quaternion normalization. Also folds each Gaussian's |dL/dmean| into
// cloud.grad_norm_sum (one sample per call), so the cloud is taken mutable;
// concurrent backward passes over the same cloud need external ordering for
// that accumulator. Throws contract_error if dL_dimage does not match slice.
ParamGrads render_backward(GaussianCloud& cloud, const SliceSpec& slice, const TileBins& bins,
                           const Image& dL_dimage, const RenderOptions& opts = {});

} // namespace volsplat
