// SPDX-License-Identifier: Apache-2.0
//
// Prepared rendering path: per-axis caches and reusable buffers so the
// training loop can render and back-propagate hundreds of slices per step
// without re-deriving per-Gaussian quantities. The public cloud-level entry
// points in rasterizer.hpp are thin wrappers over these.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "splat_detail.hpp"
#include "volsplat/rasterizer.hpp"

namespace volsplat::detail {

// Depth-independent view of a whole cloud along one axis. Activated values
// and backward statics are cached; rebuild after any parameter update.
struct AxisPrep {
    Axis axis = Axis::z;
    bool with_r_max = false; // r_max populated (needed by method m1 only)
    std::vector<AxisGaussian> ag;
    std::vector<double> alpha;   // N activated opacity
    std::vector<double> color;   // N activated intensity
    std::vector<double> mean;    // 3N world means
    std::vector<double> amat;    // 6N world inverse covariance (00,01,02,11,12,22)
    std::vector<double> rot;     // 9N rotation, row-major
    std::vector<double> scale;   // 3N activated scales
    std::vector<double> dsgate;  // 3N d(scale)/d(log_scale); 0 where floored
    std::vector<double> qhat;    // 4N unit quaternion (w,x,y,z)
    std::vector<double> qnorm;   // N norm of the raw quaternion

    std::size_t size() const { return alpha.size(); }
};

AxisPrep make_axis_prep(const GaussianCloud& cloud, Axis axis, bool with_r_max);

// One composited Gaussian at one pixel, recorded by the backward recompute.
struct CompositeEntry {
    std::uint32_t idx;
    double p; // factorized density
    double w; // p * alpha
    double t; // transmittance before this Gaussian
};

// Reusable buffers; one instance per thread. All arrays are kept sized to the
// prep and zeroed between slices (only entries touched by the slice's active
// set are written, so re-zeroing walks the active list, not the whole cloud).
struct RenderScratch {
    std::vector<CompositeEntry> entries;
    std::vector<double> gmu;    // 3N accumulated dL/dmean
    std::vector<double> gcov;   // 6N accumulated dL/dSigma (00,01,02,11,12,22)
    std::vector<double> galpha; // N
    std::vector<double> gcolor; // N
    std::size_t sized_for = static_cast<std::size_t>(-1);

    void ensure(std::size_t n) {
        if (sized_for == n) return;
        gmu.assign(3 * n, 0.0);
        gcov.assign(6 * n, 0.0);
        galpha.assign(n, 0.0);
        gcolor.assign(n, 0.0);
        sized_for = n;
    }
};

TileBins bin_prepared(const AxisPrep& prep, const SliceSpec& slice, const RenderOptions& opts);

RenderedSlice render_prepared(const AxisPrep& prep, const SliceSpec& slice, const TileBins& bins,
                              const RenderOptions& opts);

// Adds this slice's gradients into `grads` (must be assign_zero'd to the prep
// size by the caller) including per-Gaussian mean-gradient norms; does not
// touch any cloud accumulator. Single-threaded over the slice.
void backward_prepared(const AxisPrep& prep, const SliceSpec& slice, const TileBins& bins,
                       const Image& dL_dimage, const RenderOptions& opts, RenderScratch& scratch,
                       ParamGrads& grads);

} // namespace volsplat::detail
