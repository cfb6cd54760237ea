// SPDX-License-Identifier: Apache-2.0
#include "volsplat/checkpoint.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "binio.hpp"

namespace volsplat {

namespace {

constexpr char kMagic[4] = {'I', 'G', 'S', '1'};

void check_finite_array(const detail::ByteReader& r, std::size_t array_off,
                        const std::vector<float>& a, const char* name) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(a[i]))
            r.fail_at(array_off + 4 * i, std::string(name) + " value is not finite");
}

} // namespace

void save_checkpoint(const GaussianCloud& cloud, const std::string& path) {
    cloud.check_consistent();
    std::size_t n = cloud.size();

    detail::ByteWriter w;
    w.magic(kMagic);
    w.u64(n);
    for (int i = 0; i < 3; ++i) w.f64(cloud.bounds.lo[i]);
    for (int i = 0; i < 3; ++i) w.f64(cloud.bounds.hi[i]);
    w.f32_array(cloud.mean.data(), 3 * n);
    w.f32_array(cloud.log_scale.data(), 3 * n);
    w.f32_array(cloud.rotation.data(), 4 * n);
    w.f32_array(cloud.opacity_raw.data(), n);
    w.f32_array(cloud.intensity_raw.data(), n);
    detail::write_file_bytes(path, w.bytes());

    nlohmann::json sidecar;
    sidecar["format"] = "IGS1";
    sidecar["count"] = n;
    sidecar["bounds"] = {{"lo", {cloud.bounds.lo.x(), cloud.bounds.lo.y(), cloud.bounds.lo.z()}},
                         {"hi", {cloud.bounds.hi.x(), cloud.bounds.hi.y(), cloud.bounds.hi.z()}}};
    sidecar["fields"] = {"mean", "log_scale", "rotation", "opacity_raw", "intensity_raw"};
    std::string text = sidecar.dump(2);
    text.push_back('\n');
    std::vector<unsigned char> bytes(text.begin(), text.end());
    detail::write_file_bytes(path + ".json", bytes);
}

GaussianCloud load_checkpoint(const std::string& path) {
    std::vector<unsigned char> bytes = detail::read_file_bytes(path);
    detail::ByteReader r(bytes, path);

    r.expect_magic(kMagic);
    std::size_t count_off = r.offset();
    std::uint64_t n64 = r.u64("Gaussian count");

    std::size_t bounds_off = r.offset();
    GaussianCloud cloud;
    for (int i = 0; i < 3; ++i) cloud.bounds.lo[i] = r.f64("bounds");
    for (int i = 0; i < 3; ++i) cloud.bounds.hi[i] = r.f64("bounds");
    if (!cloud.bounds.valid())
        r.fail_at(bounds_off, "bounds must be finite with hi >= lo per axis");

    // 12 floats per Gaussian; reject counts the remaining bytes cannot hold
    // before any allocation happens.
    if (n64 > r.remaining() / 48 || r.remaining() != n64 * 48)
        r.fail_at(count_off, "payload length mismatch: count " + std::to_string(n64) +
                                 " implies " + std::to_string(n64 * 48) + " bytes, file has " +
                                 std::to_string(r.remaining()));
    std::size_t n = static_cast<std::size_t>(n64);

    cloud.resize(n);
    std::size_t mean_off = r.offset();
    r.f32_array(cloud.mean.data(), 3 * n, "mean array");
    std::size_t scale_off = r.offset();
    r.f32_array(cloud.log_scale.data(), 3 * n, "log_scale array");
    std::size_t rot_off = r.offset();
    r.f32_array(cloud.rotation.data(), 4 * n, "rotation array");
    std::size_t op_off = r.offset();
    r.f32_array(cloud.opacity_raw.data(), n, "opacity array");
    std::size_t in_off = r.offset();
    r.f32_array(cloud.intensity_raw.data(), n, "intensity array");
    r.expect_eof("parameter arrays");

    check_finite_array(r, mean_off, cloud.mean, "mean");
    check_finite_array(r, scale_off, cloud.log_scale, "log_scale");
    check_finite_array(r, rot_off, cloud.rotation, "rotation");
    check_finite_array(r, op_off, cloud.opacity_raw, "opacity");
    check_finite_array(r, in_off, cloud.intensity_raw, "intensity");
    for (std::size_t i = 0; i < n; ++i) {
        double qn = 0.0;
        for (int c = 0; c < 4; ++c) {
            double q = cloud.rotation[4 * i + c];
            qn += q * q;
        }
        if (!(qn > 0.0))
            r.fail_at(rot_off + 16 * i, "rotation quaternion has zero length");
    }
    return cloud;
}

} // namespace volsplat
