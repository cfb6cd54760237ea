// SPDX-License-Identifier: Apache-2.0
#include "volsplat/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "volsplat/gaussian.hpp"
#include "volsplat/rng.hpp"

namespace volsplat {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool inside_shell(const EllipsoidShell& s, const Vec3& world) {
    Vec3 local = s.rotation.transpose() * (world - s.center);
    Vec3 scaled = local.cwiseQuotient(s.semi_axes);
    return scaled.squaredNorm() <= 1.0;
}

PhantomParams draw_nested_ellipsoids(PhantomParams p) {
    Rng rng(static_cast<std::uint64_t>(p.seed) * 0x9e3779b97f4a7c15ull + 1);
    Vec3 dims(static_cast<double>(p.nx), static_cast<double>(p.ny), static_cast<double>(p.nz));
    Vec3 center = 0.5 * dims;
    Mat3 rot = quaternion_to_rotation(rng.unit_quaternion());

    int count = 3 + static_cast<int>(rng.below(4)); // 3..6 shells

    // One intensity slot of width 0.8/count per shell, drawn from the middle
    // 40% of its slot: adjacent values stay >= 0.08 apart even at count = 6.
    std::vector<int> slot(count);
    for (int i = 0; i < count; ++i) slot[i] = i;
    for (int i = count - 1; i > 0; --i)
        std::swap(slot[i], slot[rng.below(static_cast<std::uint64_t>(i) + 1)]);

    double prev_frac = 1.0;
    for (int s = 0; s < count; ++s) {
        double base_frac =
            count > 1 ? 0.42 + (0.12 - 0.42) * static_cast<double>(s) / (count - 1) : 0.30;
        EllipsoidShell shell;
        shell.center = center;
        shell.rotation = rot;
        for (int a = 0; a < 3; ++a) {
            double frac = base_frac * rng.uniform(0.96, 1.04);
            frac = std::min(frac, prev_frac * 0.90); // enforce strict nesting
            shell.semi_axes[a] = frac * dims[a];
        }
        prev_frac = base_frac;
        shell.intensity = 0.15 + (0.8 / count) * (slot[s] + 0.3 + 0.4 * rng.uniform01());
        p.shells.push_back(shell);
    }

    p.gradient_amp = 0.04;
    Vec3 dir(rng.normal(), rng.normal(), rng.normal());
    double n = dir.norm();
    p.gradient_dir = n > 1e-9 ? Vec3(dir / n) : Vec3::UnitX();
    return p;
}

PhantomParams draw_checker_shells(PhantomParams p) {
    Rng rng(static_cast<std::uint64_t>(p.seed) * 0x9e3779b97f4a7c15ull + 2);
    Vec3 dims(static_cast<double>(p.nx), static_cast<double>(p.ny), static_cast<double>(p.nz));
    double min_dim = dims.minCoeff();

    p.shell_center = 0.5 * dims;
    p.band_width = rng.uniform(0.08, 0.14) * min_dim;
    p.outer_radius = 0.45 * min_dim;
    p.band_hi = rng.uniform(0.65, 0.80);
    p.band_lo = rng.uniform(0.20, 0.35);
    p.checker_period = rng.uniform(3.0, 6.0);
    p.checker_amp = 0.05;
    for (int a = 0; a < 3; ++a) p.checker_offset[a] = rng.uniform(0.0, p.checker_period);
    return p;
}

} // namespace

PhantomParams phantom_params(PhantomKind kind, int nx, int ny, int nz, std::uint32_t seed) {
    if (nx < 16 || ny < 16 || nz < 16)
        throw config_error("phantom_params: dims must be >= 16 per axis, got " +
                           std::to_string(nx) + "x" + std::to_string(ny) + "x" +
                           std::to_string(nz));
    PhantomParams p;
    p.kind = kind;
    p.nx = nx;
    p.ny = ny;
    p.nz = nz;
    p.seed = seed;
    p.background = 0.05;
    return kind == PhantomKind::nested_ellipsoids ? draw_nested_ellipsoids(std::move(p))
                                                  : draw_checker_shells(std::move(p));
}

double phantom_value(const PhantomParams& p, const Vec3& world) {
    if (p.kind == PhantomKind::nested_ellipsoids) {
        // Innermost shell containing the point wins; shells are ordered
        // outermost first, so scan from the back.
        for (int s = static_cast<int>(p.shells.size()) - 1; s >= 0; --s) {
            if (inside_shell(p.shells[static_cast<std::size_t>(s)], world)) {
                double v = p.shells[static_cast<std::size_t>(s)].intensity;
                if (s + 1 == static_cast<int>(p.shells.size()))
                    return clamp01(v); // innermost region: no gradient, exact value
                Vec3 dims(static_cast<double>(p.nx), static_cast<double>(p.ny),
                          static_cast<double>(p.nz));
                double ramp = p.gradient_dir.dot(world - 0.5 * dims) / dims.maxCoeff();
                return clamp01(v + p.gradient_amp * ramp);
            }
        }
        Vec3 dims(static_cast<double>(p.nx), static_cast<double>(p.ny),
                  static_cast<double>(p.nz));
        double ramp = p.gradient_dir.dot(world - 0.5 * dims) / dims.maxCoeff();
        return clamp01(p.background + p.gradient_amp * ramp);
    }

    double r = (world - p.shell_center).norm();
    if (r >= p.outer_radius) return clamp01(p.background);
    std::int64_t band = static_cast<std::int64_t>(std::floor(r / p.band_width));
    double v = (band % 2 == 0) ? p.band_hi : p.band_lo;
    std::int64_t parity = 0;
    for (int a = 0; a < 3; ++a)
        parity += static_cast<std::int64_t>(
            std::floor((world[a] + p.checker_offset[a]) / p.checker_period));
    v += ((parity % 2 + 2) % 2 == 0) ? p.checker_amp : -p.checker_amp;
    return clamp01(v);
}

Volume make_phantom(const PhantomParams& p) {
    Volume vol(p.nx, p.ny, p.nz);
    for (int z = 0; z < p.nz; ++z)
        for (int y = 0; y < p.ny; ++y)
            for (int x = 0; x < p.nx; ++x)
                vol.at(x, y, z) = static_cast<float>(
                    phantom_value(p, Vec3(x + 0.5, y + 0.5, z + 0.5)));
    vol.metadata["phantom_kind"] = p.kind == PhantomKind::nested_ellipsoids
                                       ? "nested_ellipsoids"
                                       : "checker_shells";
    vol.metadata["phantom_seed"] = std::to_string(p.seed);
    return vol;
}

Volume make_phantom(PhantomKind kind, int nx, int ny, int nz, std::uint32_t seed) {
    return make_phantom(phantom_params(kind, nx, ny, nz, seed));
}

} // namespace volsplat
