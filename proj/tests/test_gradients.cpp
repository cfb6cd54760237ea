// SPDX-License-Identifier: Apache-2.0
//
// Finite-difference validation of the analytic backward pass. Parameters are
// stored float32, so each probe writes the rounded values fl(x +- h) and
// divides by the realized step (xp - xm) in double; that keeps the central
// difference honest at h = 1e-4 without float-quantization bias. Bins are
// built once from the unperturbed cloud (the sort is treated as constant) and
// early termination is disabled so the composited loss is smooth.
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "volsplat/rasterizer.hpp"

using namespace volsplat;

namespace {

struct FdProblem {
    GaussianCloud cloud;
    SliceSpec slice;
    RenderOptions opts;
    TileBins bins;
    Image coeff; // dL/dimage for L = sum coeff * pixel

    double loss() {
        RenderedSlice out = render_slice(cloud, slice, bins, opts);
        double l = 0.0;
        for (std::size_t k = 0; k < coeff.data.size(); ++k)
            l += coeff.data[k] * out.image.data[k];
        return l;
    }

    double fd(float* slot, double h = 1e-4) {
        float orig = *slot;
        float xp = static_cast<float>(static_cast<double>(orig) + h);
        float xm = static_cast<float>(static_cast<double>(orig) - h);
        *slot = xp;
        double fp = loss();
        *slot = xm;
        double fm = loss();
        *slot = orig;
        return (fp - fm) / (static_cast<double>(xp) - static_cast<double>(xm));
    }
};

FdProblem make_problem(Rng& rng, std::size_t n, int wh) {
    FdProblem pr;
    Box3 box{Vec3::Zero(), Vec3::Constant(static_cast<double>(wh))};
    pr.cloud = oracles::random_cloud(rng, n, box, 0.6, 2.5);
    pr.slice.axis = static_cast<Axis>(rng.below(3));
    pr.slice.t = rng.uniform(0.25 * wh, 0.75 * wh);
    pr.slice.width = wh;
    pr.slice.height = wh;
    pr.slice.origin_u = 0.5;
    pr.slice.origin_v = 0.5;
    pr.slice.pitch = 1.0;
    pr.opts.epsilon = 1e-8;
    pr.opts.early_stop = 0.0;
    pr.bins = bin_gaussians(pr.cloud, pr.slice, pr.opts);
    pr.coeff = Image(wh, wh);
    for (double& c : pr.coeff.data) c = rng.uniform(-1.0, 1.0);
    return pr;
}

void check_grad(double analytic, double numeric, double rel = 1e-3, double abs_floor = 1e-6) {
    double tol = std::max(abs_floor, rel * std::max(std::abs(analytic), std::abs(numeric)));
    CHECK(std::abs(analytic - numeric) <= tol);
}

} // namespace

TEST_SUITE("gradients") {

TEST_CASE("single gaussian, single pixel: intensity gradient to relative 1e-4") {
    Gaussian3D g;
    g.mean = Vec3(4.3, 3.8, 5.1);
    g.log_scale = Vec3(0.3, -0.2, 0.5);
    g.rotation = Vec4(0.9, 0.2, -0.3, 0.1);
    g.opacity_raw = inverse_sigmoid(0.6);
    g.intensity_raw = inverse_sigmoid(0.4);
    FdProblem pr;
    pr.cloud.bounds = {Vec3::Zero(), Vec3::Constant(8.0)};
    pr.cloud.push_back(g);
    pr.slice = {Axis::z, 5.0, 8, 8, 0.5, 0.5, 1.0};
    pr.opts.epsilon = 1e-8;
    pr.opts.early_stop = 0.0;
    pr.bins = bin_gaussians(pr.cloud, pr.slice, pr.opts);
    pr.coeff = Image(8, 8, 0.0);
    pr.coeff.at(4, 3) = 1.0;

    ParamGrads grads = render_backward(pr.cloud, pr.slice, pr.bins, pr.coeff, pr.opts);
    double numeric = pr.fd(&pr.cloud.intensity_raw[0]);
    CHECK(std::abs(grads.intensity_raw[0] - numeric) <=
          1e-4 * std::max(std::abs(numeric), std::abs(grads.intensity_raw[0])));
}

TEST_CASE("all five parameter groups match central differences over 20 seeds") {
    for (int seed = 0; seed < 20; ++seed) {
        Rng rng(1000 + seed);
        FdProblem pr = make_problem(rng, 5, 8);
        // Exercise the normalization chain with a non-unit stored quaternion.
        for (int k = 0; k < 4; ++k) pr.cloud.rotation[k] *= 1.7f;
        pr.bins = bin_gaussians(pr.cloud, pr.slice, pr.opts);

        ParamGrads grads = render_backward(pr.cloud, pr.slice, pr.bins, pr.coeff, pr.opts);
        for (std::size_t i = 0; i < pr.cloud.size(); ++i) {
            for (int k = 0; k < 3; ++k) {
                check_grad(grads.mean[3 * i + k], pr.fd(&pr.cloud.mean[3 * i + k]));
                check_grad(grads.log_scale[3 * i + k], pr.fd(&pr.cloud.log_scale[3 * i + k]));
            }
            for (int k = 0; k < 4; ++k)
                check_grad(grads.rotation[4 * i + k], pr.fd(&pr.cloud.rotation[4 * i + k]));
            check_grad(grads.opacity_raw[i], pr.fd(&pr.cloud.opacity_raw[i]));
            check_grad(grads.intensity_raw[i], pr.fd(&pr.cloud.intensity_raw[i]));
        }
    }
}

TEST_CASE("floored scales have zero gradient, matching the clamped forward") {
    Rng rng(42);
    FdProblem pr = make_problem(rng, 3, 8);
    // Push one axis of gaussian 1 well under the scale floor.
    pr.cloud.log_scale[3 * 1 + 2] = static_cast<float>(std::log(kScaleFloor) - 0.5);
    pr.bins = bin_gaussians(pr.cloud, pr.slice, pr.opts);

    ParamGrads grads = render_backward(pr.cloud, pr.slice, pr.bins, pr.coeff, pr.opts);
    CHECK(grads.log_scale[3 * 1 + 2] == 0.0);
    CHECK(pr.fd(&pr.cloud.log_scale[3 * 1 + 2]) == 0.0);
}

TEST_CASE("gradients at a depth-shifted slice (conditional center moves)") {
    // Correlated covariance and an off-center slice exercise the cross-term
    // path (the conditional mean depends on t) rather than the central slice.
    for (int seed = 0; seed < 5; ++seed) {
        Rng rng(7700 + seed);
        FdProblem pr = make_problem(rng, 4, 8);
        for (std::size_t i = 0; i < pr.cloud.size(); ++i) {
            // Strongly anisotropic, randomly oriented.
            pr.cloud.log_scale[3 * i + 0] = static_cast<float>(std::log(3.0));
            pr.cloud.log_scale[3 * i + 1] = static_cast<float>(std::log(0.4));
        }
        pr.bins = bin_gaussians(pr.cloud, pr.slice, pr.opts);
        ParamGrads grads = render_backward(pr.cloud, pr.slice, pr.bins, pr.coeff, pr.opts);
        for (std::size_t i = 0; i < pr.cloud.size(); ++i)
            for (int k = 0; k < 3; ++k) {
                check_grad(grads.mean[3 * i + k], pr.fd(&pr.cloud.mean[3 * i + k]));
                check_grad(grads.log_scale[3 * i + k], pr.fd(&pr.cloud.log_scale[3 * i + k]));
            }
    }
}

TEST_CASE("gradients with early termination active still match the truncated loss") {
    // With the cutoff enabled both the forward loss and the backward pass
    // process the same prefix; probes that stay clear of the threshold
    // boundary agree with finite differences of the truncated compositing.
    Rng rng(99);
    FdProblem pr = make_problem(rng, 6, 8);
    for (std::size_t i = 0; i < pr.cloud.size(); ++i)
        pr.cloud.opacity_raw[i] = static_cast<float>(inverse_sigmoid(0.97));
    pr.opts.early_stop = 1e-4;
    pr.bins = bin_gaussians(pr.cloud, pr.slice, pr.opts);
    ParamGrads grads = render_backward(pr.cloud, pr.slice, pr.bins, pr.coeff, pr.opts);
    // Opacity/intensity gradients are the ones most exposed to truncation.
    for (std::size_t i = 0; i < pr.cloud.size(); ++i) {
        check_grad(grads.intensity_raw[i], pr.fd(&pr.cloud.intensity_raw[i]), 1e-3, 1e-5);
        check_grad(grads.opacity_raw[i], pr.fd(&pr.cloud.opacity_raw[i]), 1e-3, 1e-5);
    }
}

} // TEST_SUITE
