// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "volsplat/adam.hpp"
#include "volsplat/dataset.hpp"
#include "volsplat/gaussian.hpp"
#include "volsplat/rasterizer.hpp"
#include "volsplat/rng.hpp"

namespace volsplat {

// Full optimization recipe. Every field round-trips through the JSON config
// format (see serialize.hpp) and can be overridden from the command line.
struct TrainConfig {
    // Adam step sizes per parameter group. lr_mean is expressed per unit of
    // scene extent and multiplied by the dataset's largest bound extent at
    // train() time, so position steps scale with the scene; the others apply
    // as-is. Zero freezes a group (useful for ablations); negative rates are
    // invalid.
    double lr_mean = 1.6e-3;
    double lr_log_scale = 5e-3;
    double lr_rotation = 1e-3;
    double lr_opacity = 5e-2;
    double lr_intensity = 2.5e-2;

    int max_steps = 1000;
    int convergence_window = 100; // W
    double convergence_delta = 1e-4;

    // Refinement runs at 1-based steps s with refine_start <= s < refine_stop
    // and s % refine_interval == 0 (the stop bound is additionally clamped to
    // max_steps at runtime).
    int refine_interval = 100;
    int refine_start = 100;
    int refine_stop = 800;
    double tau_alpha = 0.005; // prune below this activated opacity
    double tau_p = 2e-4;      // mean position-gradient norm that triggers densification
    double tau_s = -1.0;      // split when ||Sigma||_F exceeds this; < 0 resolves
                              // to 1% of scene extent at train() time
    double too_large_fraction = 0.5; // prune when max scale > fraction * extent
    double clone_jitter_fraction = 0.05; // of the init grid spacing

    double ssim_weight = 0.2; // lambda in [0, 1]

    SelectMethod method = SelectMethod::m2;
    double epsilon = 0.01; // method m2 cutoff
    int tile = 16;
    double early_stop = 1e-4; // transmittance floor during rendering

    std::uint64_t seed = 0;
    int grid_resolution = 8; // init_grid_cloud resolution
    int slices_per_step = 0; // 0 = every training slice each step
    int threads = 1;         // parallelism across slices within a step

    int checkpoint_interval = 250;
    std::string checkpoint_dir; // empty: no periodic checkpoints

    // Throws config_error with the offending field named.
    void validate() const;
};

enum class StopReason { max_steps, converged };

struct RefineCounts {
    int pruned = 0; // low opacity + too large combined
    int pruned_too_large = 0;
    int split = 0;
    int cloned = 0;
    std::size_t count_after = 0;
};

struct RefineEvent : RefineCounts {
    int step = 0;
};

struct TrainReport {
    std::vector<double> loss_series; // entry i = total loss of step i+1
    std::vector<RefineEvent> refinements;
    double duration_seconds = 0.0;
    int final_step = 0;
    StopReason stop_reason = StopReason::max_steps;
    std::size_t final_count = 0;
    std::vector<std::string> checkpoints; // paths written during the run
};

// One Adam state per parameter group. Construct fresh for a new cloud; the
// states lazily size themselves on the first step.
struct Optimizer {
    AdamState mean;
    AdamState log_scale;
    AdamState rotation;
    AdamState opacity;
    AdamState intensity;
};

// First index s >= window with losses[s - window] - losses[s] < delta, or -1
// when no index qualifies. The training loop stops after the step that
// produced the qualifying entry.
int convergence_step(const std::vector<double>& losses, int window, double delta);

// Renders every training slice (or a seeded random subset of slices_per_step
// of them), accumulates analytic gradients, applies one Adam update per
// parameter group, clamps the scale floor, and renormalizes quaternions.
// Returns the summed loss over the supervised slices. Throws contract_error
// when the dataset has no training slice and training_error (naming the
// slice) when any per-slice loss is non-finite.
double train_step(GaussianCloud& cloud, const SliceDataset& dataset, const TrainConfig& config,
                  Optimizer& opt, Rng& rng);

// One densify/prune pass over the cloud. Per Gaussian: prune when activated
// opacity < tau_alpha or the largest activated scale exceeds
// too_large_fraction * extent; otherwise, when the mean position-gradient
// norm since the last refinement exceeds tau_p, split (replace with two
// children at mean +/- 0.5 * sqrt(lambda_max) * v_max, scales divided by 1.6)
// if ||Sigma||_F > tau_s, else clone with the copy's mean jittered by
// clone_jitter_fraction * grid spacing in a seeded random direction.
// Optimizer moments follow surviving Gaussians; new entries start at zero.
// Gradient accumulators are reset. Throws training_error when every Gaussian
// is pruned.
RefineCounts refine(GaussianCloud& cloud, Optimizer& opt, const TrainConfig& config, Rng& rng);

// Full optimization: grid init over the dataset bounds, train_step until the
// convergence rule or max_steps, refinement on its schedule, periodic
// checkpoints when checkpoint_dir is set. Deterministic for a fixed seed and
// thread count (bitwise in single-threaded mode).
std::pair<GaussianCloud, TrainReport> train(const SliceDataset& dataset,
                                            const TrainConfig& config);

} // namespace volsplat
