// SPDX-License-Identifier: Apache-2.0
#include "volsplat/gaussian.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace volsplat {

Mat3 quaternion_to_rotation(const Vec4& q) {
    if (!q.allFinite())
        throw contract_error("quaternion_to_rotation: quaternion has non-finite components");
    double n2 = q.squaredNorm();
    if (n2 <= 0.0)
        throw contract_error("quaternion_to_rotation: zero quaternion has no orientation");
    Vec4 u = q / std::sqrt(n2);
    double w = u[0], x = u[1], y = u[2], z = u[3];
    Mat3 R;
    R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return R;
}

Mat3 build_covariance(const Gaussian3D& g) {
    Mat3 R = quaternion_to_rotation(g.rotation);
    Vec3 s = g.scales();
    Mat3 sigma = R * s.cwiseProduct(s).asDiagonal() * R.transpose();
    // Symmetrize away the last-bit asymmetry from the two products.
    return 0.5 * (sigma + sigma.transpose());
}

double evaluate_density(const Gaussian3D& g, const Vec3& x) {
    Mat3 sigma = build_covariance(g);
    Vec3 d = x - g.mean;
    double q = d.dot(sigma.inverse() * d);
    return std::exp(-0.5 * q);
}

double max_eigenvalue(const Mat3& sigma) {
    return max_eigenpair(sigma).value;
}

Eigenpair max_eigenpair(const Mat3& sigma) {
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-8)
        throw contract_error("max_eigenpair: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(sigma);
    if (es.info() != Eigen::Success)
        throw contract_error("max_eigenpair: eigensolver failed (non-finite input?)");
    Eigenpair out;
    out.value = es.eigenvalues()[2]; // ascending order
    out.vector = es.eigenvectors().col(2);
    return out;
}

Gaussian3D GaussianCloud::get(std::size_t i) const {
    Gaussian3D g;
    for (int k = 0; k < 3; ++k) {
        g.mean[k] = mean[3 * i + k];
        g.log_scale[k] = log_scale[3 * i + k];
    }
    for (int k = 0; k < 4; ++k) g.rotation[k] = rotation[4 * i + k];
    g.opacity_raw = opacity_raw[i];
    g.intensity_raw = intensity_raw[i];
    return g;
}

void GaussianCloud::set(std::size_t i, const Gaussian3D& g) {
    for (int k = 0; k < 3; ++k) {
        mean[3 * i + k] = static_cast<float>(g.mean[k]);
        log_scale[3 * i + k] = static_cast<float>(g.log_scale[k]);
    }
    for (int k = 0; k < 4; ++k) rotation[4 * i + k] = static_cast<float>(g.rotation[k]);
    opacity_raw[i] = static_cast<float>(g.opacity_raw);
    intensity_raw[i] = static_cast<float>(g.intensity_raw);
}

void GaussianCloud::push_back(const Gaussian3D& g) {
    std::size_t i = size();
    resize(i + 1);
    set(i, g);
}

void GaussianCloud::resize(std::size_t n) {
    mean.resize(3 * n, 0.0f);
    log_scale.resize(3 * n, 0.0f);
    rotation.resize(4 * n, 0.0f);
    opacity_raw.resize(n, 0.0f);
    intensity_raw.resize(n, 0.0f);
    grad_norm_sum.resize(n, 0.0);
}

void GaussianCloud::reset_grad_accum() {
    std::fill(grad_norm_sum.begin(), grad_norm_sum.end(), 0.0);
    grad_norm_samples = 0;
}

void GaussianCloud::check_consistent() const {
    std::size_t n = opacity_raw.size();
    if (mean.size() != 3 * n || log_scale.size() != 3 * n || rotation.size() != 4 * n ||
        intensity_raw.size() != n || grad_norm_sum.size() != n)
        throw contract_error("GaussianCloud: parameter arrays disagree on count (N=" +
                             std::to_string(n) + ")");
}

GaussianCloud init_grid_cloud(int resolution, const Box3& bounds, const InitConfig& config) {
    if (resolution < 2)
        throw config_error("init_grid_cloud: resolution must be >= 2");
    if (!bounds.valid() || bounds.extent().minCoeff() <= 0.0)
        throw contract_error("init_grid_cloud: bounds must be a finite box with positive extent");

    Vec3 spacing = bounds.extent() / static_cast<double>(resolution);
    Vec3 ls = (config.scale_factor * spacing).array().log().matrix();
    double op_raw = inverse_sigmoid(config.opacity);
    double in_raw = inverse_sigmoid(config.intensity);

    GaussianCloud cloud;
    cloud.bounds = bounds;
    cloud.resize(static_cast<std::size_t>(resolution) * resolution * resolution);
    std::size_t i = 0;
    Gaussian3D g;
    g.log_scale = ls;
    g.rotation = Vec4(1, 0, 0, 0);
    g.opacity_raw = op_raw;
    g.intensity_raw = in_raw;
    for (int kz = 0; kz < resolution; ++kz)
        for (int ky = 0; ky < resolution; ++ky)
            for (int kx = 0; kx < resolution; ++kx) {
                g.mean = bounds.lo + Vec3((kx + 0.5) * spacing.x(), (ky + 0.5) * spacing.y(),
                                          (kz + 0.5) * spacing.z());
                cloud.set(i++, g);
            }
    return cloud;
}

} // namespace volsplat
