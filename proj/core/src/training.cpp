// SPDX-License-Identifier: Apache-2.0
#include "volsplat/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "render_detail.hpp"
#include "volsplat/checkpoint.hpp"
#include "volsplat/loss.hpp"
#include "volsplat/parallel.hpp"

namespace volsplat {

namespace {

const char* axis_label(Axis a) {
    switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    default: return "z";
    }
}

void require(bool ok, const std::string& what) {
    if (!ok) throw config_error("TrainConfig: " + what);
}

} // namespace

void TrainConfig::validate() const {
    require(lr_mean >= 0 && lr_log_scale >= 0 && lr_rotation >= 0 && lr_opacity >= 0 &&
                lr_intensity >= 0,
            "learning rates must be >= 0");
    require(std::isfinite(lr_mean + lr_log_scale + lr_rotation + lr_opacity + lr_intensity),
            "learning rates must be finite");
    require(max_steps >= 0, "max_steps must be >= 0");
    require(convergence_window >= 1, "convergence_window must be >= 1");
    require(convergence_delta >= 0 && std::isfinite(convergence_delta),
            "convergence_delta must be finite and >= 0");
    require(refine_interval >= 1, "refine_interval must be >= 1");
    require(refine_start >= 1, "refine_start must be >= 1");
    require(refine_start < refine_stop, "refine_start must be < refine_stop");
    require(tau_alpha >= 0 && tau_alpha < 1, "tau_alpha must lie in [0, 1)");
    require(tau_p >= 0 && std::isfinite(tau_p), "tau_p must be finite and >= 0");
    require(std::isfinite(tau_s), "tau_s must be finite (negative selects 1% of extent)");
    require(too_large_fraction > 0, "too_large_fraction must be > 0");
    require(clone_jitter_fraction >= 0, "clone_jitter_fraction must be >= 0");
    require(ssim_weight >= 0 && ssim_weight <= 1, "ssim_weight must lie in [0, 1]");
    if (method == SelectMethod::m2)
        require(epsilon > 0 && epsilon < 1, "epsilon must lie in (0, 1) for method m2");
    require(tile >= 1, "tile must be >= 1");
    require(grid_resolution >= 2, "grid_resolution must be >= 2");
    require(slices_per_step >= 0, "slices_per_step must be >= 0 (0 = all slices)");
    require(threads >= 0, "threads must be >= 0 (0 = hardware concurrency)");
    require(checkpoint_interval >= 0, "checkpoint_interval must be >= 0 (0 = disabled)");
}

int convergence_step(const std::vector<double>& losses, int window, double delta) {
    if (window < 1) throw contract_error("convergence_step: window must be >= 1");
    for (std::size_t s = static_cast<std::size_t>(window); s < losses.size(); ++s)
        if (losses[s - static_cast<std::size_t>(window)] - losses[s] < delta)
            return static_cast<int>(s);
    return -1;
}

double train_step(GaussianCloud& cloud, const SliceDataset& dataset, const TrainConfig& config,
                  Optimizer& opt, Rng& rng) {
    std::vector<const DatasetEntry*> batch = dataset.with_label(SplitLabel::train);
    if (batch.empty()) throw contract_error("train_step: dataset has no training slices");

    if (config.slices_per_step > 0 &&
        static_cast<std::size_t>(config.slices_per_step) < batch.size()) {
        // Partial Fisher-Yates: the first slices_per_step entries become a
        // uniform sample without replacement, deterministically from rng.
        std::size_t m = static_cast<std::size_t>(config.slices_per_step);
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t j = k + static_cast<std::size_t>(rng.below(batch.size() - k));
            std::swap(batch[k], batch[j]);
        }
        batch.resize(m);
    }

    bool axis_used[3] = {false, false, false};
    for (const auto* e : batch) axis_used[axis_index(e->spec.axis)] = true;
    detail::AxisPrep preps[3];
    for (int a = 0; a < 3; ++a)
        if (axis_used[a])
            preps[a] = detail::make_axis_prep(cloud, static_cast<Axis>(a),
                                              config.method == SelectMethod::m1);

    RenderOptions opts;
    opts.method = config.method;
    opts.epsilon = config.epsilon;
    opts.tile = config.tile;
    opts.early_stop = config.early_stop;
    opts.threads = 1; // parallelism lives at the slice level below

    std::size_t n = cloud.size();
    int threads = resolve_threads(config.threads);
    std::vector<ParamGrads> grads(static_cast<std::size_t>(threads));
    std::vector<detail::RenderScratch> scratch(static_cast<std::size_t>(threads));
    std::vector<double> loss_acc(static_cast<std::size_t>(threads), 0.0);
    std::vector<const DatasetEntry*> bad(static_cast<std::size_t>(threads), nullptr);
    for (auto& g : grads) g.assign_zero(n);

    parallel_chunks(batch.size(), threads, [&](int t, std::size_t b, std::size_t e) {
        auto ti = static_cast<std::size_t>(t);
        for (std::size_t i = b; i < e; ++i) {
            const DatasetEntry& entry = *batch[i];
            const detail::AxisPrep& prep = preps[axis_index(entry.spec.axis)];
            TileBins bins = detail::bin_prepared(prep, entry.spec, opts);
            RenderedSlice out = detail::render_prepared(prep, entry.spec, bins, opts);
            LossResult loss = compute_loss(out.image, entry.image, config.ssim_weight);
            if (!std::isfinite(loss.value)) {
                if (!bad[ti]) bad[ti] = &entry;
                continue;
            }
            loss_acc[ti] += loss.value;
            detail::backward_prepared(prep, entry.spec, bins, loss.dimage, opts, scratch[ti],
                                      grads[ti]);
        }
    });

    for (const auto* e : bad)
        if (e)
            throw training_error(std::string("train_step: non-finite loss on slice axis=") +
                                 axis_label(e->spec.axis) + " index=" +
                                 std::to_string(e->index_on_axis));

    ParamGrads& total = grads[0];
    for (int t = 1; t < threads; ++t) total.add(grads[static_cast<std::size_t>(t)]);
    double loss_total = 0.0;
    for (double v : loss_acc) loss_total += v;

    for (std::size_t i = 0; i < n; ++i) cloud.grad_norm_sum[i] += total.mean_norm[i];
    cloud.grad_norm_samples += static_cast<std::int64_t>(batch.size());

    double extent = cloud.bounds.max_extent();
    opt.mean.step(cloud.mean, total.mean, config.lr_mean * extent);
    opt.log_scale.step(cloud.log_scale, total.log_scale, config.lr_log_scale);
    opt.rotation.step(cloud.rotation, total.rotation, config.lr_rotation);
    opt.opacity.step(cloud.opacity_raw, total.opacity_raw, config.lr_opacity);
    opt.intensity.step(cloud.intensity_raw, total.intensity_raw, config.lr_intensity);

    const float ls_floor = static_cast<float>(std::log(kScaleFloor));
    for (float& ls : cloud.log_scale)
        if (!(ls >= ls_floor)) ls = ls_floor; // also catches NaN
    for (std::size_t i = 0; i < n; ++i) {
        double qn = 0.0;
        for (int c = 0; c < 4; ++c) {
            double q = cloud.rotation[4 * i + c];
            qn += q * q;
        }
        qn = std::sqrt(qn);
        if (!(qn > 0.0) || !std::isfinite(qn)) {
            cloud.rotation[4 * i + 0] = 1.0f;
            for (int c = 1; c < 4; ++c) cloud.rotation[4 * i + c] = 0.0f;
        } else {
            for (int c = 0; c < 4; ++c)
                cloud.rotation[4 * i + c] =
                    static_cast<float>(cloud.rotation[4 * i + c] / qn);
        }
    }
    return loss_total;
}

RefineCounts refine(GaussianCloud& cloud, Optimizer& opt, const TrainConfig& config, Rng& rng) {
    if (cloud.empty()) throw training_error("refine: cloud is already empty");
    double extent = cloud.bounds.max_extent();
    double tau_s = config.tau_s < 0 ? 0.01 * extent : config.tau_s;
    double too_large = config.too_large_fraction * extent;
    double jitter_len = config.clone_jitter_fraction * extent /
                        std::max(1, config.grid_resolution);

    GaussianCloud out;
    out.bounds = cloud.bounds;
    std::vector<std::int64_t> src;
    RefineCounts counts;

    for (std::size_t i = 0; i < cloud.size(); ++i) {
        Gaussian3D g = cloud.get(i);
        if (g.opacity() < config.tau_alpha) {
            counts.pruned += 1;
            continue;
        }
        if (g.scales().maxCoeff() > too_large) {
            counts.pruned += 1;
            counts.pruned_too_large += 1;
            continue;
        }
        if (cloud.mean_grad_norm(i) > config.tau_p) {
            Mat3 sigma = build_covariance(g);
            if (sigma.norm() > tau_s) { // Frobenius norm
                Eigenpair principal = max_eigenpair(sigma);
                Vec3 offset = 0.5 * std::sqrt(principal.value) * principal.vector;
                Gaussian3D child = g;
                child.log_scale = g.log_scale.array() - std::log(1.6);
                child.mean = g.mean + offset;
                out.push_back(child);
                src.push_back(-1);
                child.mean = g.mean - offset;
                out.push_back(child);
                src.push_back(-1);
                counts.split += 1;
                continue; // the parent is consumed by its children
            }
            out.push_back(g);
            src.push_back(static_cast<std::int64_t>(i));
            Gaussian3D copy = g;
            Vec3 dir(rng.normal(), rng.normal(), rng.normal());
            double dn = dir.norm();
            if (dn > 1e-12) copy.mean += (jitter_len / dn) * dir;
            out.push_back(copy);
            src.push_back(-1);
            counts.cloned += 1;
            continue;
        }
        out.push_back(g);
        src.push_back(static_cast<std::int64_t>(i));
    }

    if (out.empty())
        throw training_error("refine: all " + std::to_string(cloud.size()) +
                             " Gaussians were pruned (opacity floor " +
                             std::to_string(config.tau_alpha) + ")");

    opt.mean.remap(src, 3);
    opt.log_scale.remap(src, 3);
    opt.rotation.remap(src, 4);
    opt.opacity.remap(src, 1);
    opt.intensity.remap(src, 1);

    counts.count_after = out.size();
    cloud = std::move(out);
    cloud.reset_grad_accum();
    return counts;
}

std::pair<GaussianCloud, TrainReport> train(const SliceDataset& dataset,
                                            const TrainConfig& config) {
    config.validate();
    auto t0 = std::chrono::steady_clock::now();

    GaussianCloud cloud = init_grid_cloud(config.grid_resolution, dataset.bounds);
    Optimizer opt;
    Rng rng(config.seed);
    TrainReport report;

    // The default schedule outlives short runs; the half-open stop bound is
    // clamped so refine_stop > max_steps simply means "refine to the end".
    int refine_stop = std::min(config.refine_stop, config.max_steps);

    for (int step = 1; step <= config.max_steps; ++step) {
        double loss = train_step(cloud, dataset, config, opt, rng);
        report.loss_series.push_back(loss);
        report.final_step = step;

        if (convergence_step(report.loss_series, config.convergence_window,
                             config.convergence_delta) >= 0) {
            report.stop_reason = StopReason::converged;
            break;
        }
        if (step >= config.refine_start && step < refine_stop &&
            step % config.refine_interval == 0) {
            RefineEvent event;
            static_cast<RefineCounts&>(event) = refine(cloud, opt, config, rng);
            event.step = step;
            report.refinements.push_back(event);
        }
        if (!config.checkpoint_dir.empty() && config.checkpoint_interval > 0 &&
            step % config.checkpoint_interval == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "step_%06d.igs", step);
            std::string path = config.checkpoint_dir + "/" + name;
            save_checkpoint(cloud, path);
            report.checkpoints.push_back(path);
        }
    }

    report.final_count = cloud.size();
    report.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(cloud), report};
}

} // namespace volsplat
