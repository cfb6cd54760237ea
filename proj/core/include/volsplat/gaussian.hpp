// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "volsplat/types.hpp"

namespace volsplat {

// Scales are clamped here so the covariance stays invertible no matter what
// the optimizer writes into log_scale.
inline constexpr double kScaleFloor = 1e-4;

// One anisotropic Gaussian primitive, parameters in their raw (pre-activation)
// form. rotation is a quaternion stored (w, x, y, z); it need not be unit
// length, covariance construction normalizes it.
struct Gaussian3D {
    Vec3 mean = Vec3::Zero();
    Vec3 log_scale = Vec3::Zero();
    Vec4 rotation = Vec4(1, 0, 0, 0);
    double opacity_raw = 0.0;
    double intensity_raw = 0.0;

    double opacity() const { return sigmoid(opacity_raw); }
    double intensity() const { return sigmoid(intensity_raw); }
    Vec3 scales() const {
        return log_scale.array().exp().max(kScaleFloor).matrix();
    }
};

// Rotation matrix of q normalized to unit length. Throws contract_error if q
// is all zero or not finite. Renormalization keeps |q_hat| = 1 within 1e-12,
// which every covariance below relies on.
Mat3 quaternion_to_rotation(const Vec4& q);

// Sigma = R diag(s^2) R^T for the activated scales s. Symmetric positive
// definite by construction (scale floor keeps it invertible).
Mat3 build_covariance(const Gaussian3D& g);

// Unnormalized density exp(-1/2 (x - mu)^T Sigma^{-1} (x - mu)). Peak value
// is 1 at the mean regardless of Sigma.
double evaluate_density(const Gaussian3D& g, const Vec3& x);

// Largest eigenvalue of a symmetric positive semi-definite 3x3 matrix.
double max_eigenvalue(const Mat3& sigma);

// Largest eigenvalue and a unit eigenvector for it (sign unspecified).
struct Eigenpair {
    double value = 0.0;
    Vec3 vector = Vec3::UnitX();
};
Eigenpair max_eigenpair(const Mat3& sigma);

struct InitConfig {
    double opacity = 0.1;     // activated value; stored raw via inverse sigmoid
    double intensity = 0.5;   // activated value
    double scale_factor = 0.5; // isotropic scale = factor * grid spacing
};

// Structure-of-arrays Gaussian cloud. Parameters are stored float32 (the
// checkpoint format is f32 and round-trips must be bitwise); all math reads
// them into doubles. Arrays are index-aligned; grad_norm_sum/samples back the
// running mean gradient magnitude that drives refinement.
struct GaussianCloud {
    std::vector<float> mean;          // 3N, xyz interleaved
    std::vector<float> log_scale;     // 3N
    std::vector<float> rotation;      // 4N, wxyz interleaved
    std::vector<float> opacity_raw;   // N
    std::vector<float> intensity_raw; // N
    std::vector<double> grad_norm_sum; // N, sum of per-backward-call |dL/dmean|
    std::int64_t grad_norm_samples = 0;
    Box3 bounds;

    std::size_t size() const { return opacity_raw.size(); }
    bool empty() const { return opacity_raw.empty(); }

    Gaussian3D get(std::size_t i) const;
    void set(std::size_t i, const Gaussian3D& g);
    void push_back(const Gaussian3D& g);
    void resize(std::size_t n);

    double mean_grad_norm(std::size_t i) const {
        return grad_norm_samples > 0 ? grad_norm_sum[i] / static_cast<double>(grad_norm_samples)
                                     : 0.0;
    }
    void reset_grad_accum();

    // Throws contract_error if array lengths disagree.
    void check_consistent() const;
};

// Regular res^3 grid of Gaussians at cell centers of `bounds` (strictly
// interior). Iteration order is x fastest, then y, then z. Per-axis scale is
// scale_factor * (extent/res) of that axis. Throws config_error for res < 2.
GaussianCloud init_grid_cloud(int resolution, const Box3& bounds,
                              const InitConfig& config = {});

} // namespace volsplat
