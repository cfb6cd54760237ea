// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "volsplat/types.hpp"

namespace volsplat {

// mt19937_64 is bit-exact across conforming implementations; the transforms
// below are hand-rolled because std:: distributions are not. Every value that
// must reproduce bit-for-bit from a seed flows through this wrapper.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Log-uniform over [lo, hi], lo > 0.
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    // Standard normal via Box-Muller; one value per call, no cached spare,
    // so the consumption pattern stays obvious.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Uniform over the unit quaternion sphere (w, x, y, z).
    Vec4 unit_quaternion() {
        Vec4 q;
        double n2 = 0.0;
        do {
            for (int i = 0; i < 4; ++i) q[i] = normal();
            n2 = q.squaredNorm();
        } while (n2 < 1e-12);
        return q / std::sqrt(n2);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace volsplat
