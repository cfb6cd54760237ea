// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "volsplat/adam.hpp"
#include "volsplat/rng.hpp"

using namespace volsplat;

TEST_SUITE("adam") {

TEST_CASE("first step moves by lr * g / (|g| + eps)") {
    std::vector<float> p = {1.0f, -2.0f};
    std::vector<double> g = {0.5, -3.0};
    AdamState st;
    st.step(p, g, 0.1);
    // With t = 1 the bias-corrected moments are exactly g and g^2.
    CHECK(p[0] == static_cast<float>(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)));
    CHECK(p[1] == static_cast<float>(-2.0 - 0.1 * (-3.0) / (3.0 + 1e-8)));
    CHECK(st.t == 1);
}

TEST_CASE("zero gradient leaves parameters untouched") {
    std::vector<float> p = {0.25f, 4.0f, -1.5f};
    std::vector<double> g = {0.0, 0.0, 0.0};
    AdamState st;
    for (int k = 0; k < 10; ++k) st.step(p, g, 0.5);
    CHECK(p[0] == 0.25f);
    CHECK(p[1] == 4.0f);
    CHECK(p[2] == -1.5f);
}

TEST_CASE("matches an independent reference over random gradient sequences") {
    Rng rng(77);
    std::vector<float> p = {0.3f, -1.2f, 2.5f, 0.0f};
    std::vector<float> ref = p;
    std::vector<double> rm(p.size(), 0.0), rv(p.size(), 0.0);
    AdamState st;

    for (int step = 1; step <= 50; ++step) {
        std::vector<double> g(p.size());
        for (double& x : g) x = rng.normal() * 0.3;
        st.step(p, g, 3e-3);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            rm[i] = 0.9 * rm[i] + 0.1 * g[i];
            rv[i] = 0.999 * rv[i] + 0.001 * g[i] * g[i];
            double mhat = rm[i] / (1.0 - std::pow(0.9, step));
            double vhat = rv[i] / (1.0 - std::pow(0.999, step));
            ref[i] = static_cast<float>(static_cast<double>(ref[i]) -
                                        3e-3 * mhat / (std::sqrt(vhat) + 1e-8));
        }
    }
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == ref[i]);
}

TEST_CASE("converges on a quadratic bowl") {
    std::vector<float> p = {-4.0f};
    AdamState st;
    for (int k = 0; k < 800; ++k) {
        std::vector<double> g = {2.0 * (static_cast<double>(p[0]) - 3.0)};
        st.step(p, g, 0.05);
    }
    CHECK(std::abs(static_cast<double>(p[0]) - 3.0) < 1e-2);
}

TEST_CASE("remap keeps survivors' moments, zeroes new entries, preserves t") {
    std::vector<float> p = {1.0f, 2.0f, 3.0f};
    AdamState st;
    std::vector<double> g = {0.1, -0.2, 0.3};
    st.step(p, g, 1e-2);
    st.step(p, g, 1e-2);
    double m1 = st.m[1], v1 = st.v[1];

    // Keep entry 1, drop 0 and 2, append two new entries.
    st.remap({1, -1, -1}, 1);
    REQUIRE(st.m.size() == 3);
    CHECK(st.m[0] == m1);
    CHECK(st.v[0] == v1);
    CHECK(st.m[1] == 0.0);
    CHECK(st.m[2] == 0.0);
    CHECK(st.t == 2);
}

TEST_CASE("remap honors stride") {
    std::vector<float> p = {1, 2, 3, 4, 5, 6}; // two entries, stride 3
    AdamState st;
    st.step(p, {1, 2, 3, 4, 5, 6}, 1e-3);
    st.remap({1, 0}, 3); // swap the two entries
    CHECK(st.m[0] == doctest::Approx(0.4));
    CHECK(st.m[3] == doctest::Approx(0.1));
}

TEST_CASE("size mismatches are rejected") {
    std::vector<float> p = {1.0f};
    AdamState st;
    CHECK_THROWS_AS(st.step(p, {1.0, 2.0}, 1e-3), contract_error);
    st.step(p, {1.0}, 1e-3);
    std::vector<float> q = {1.0f, 2.0f};
    CHECK_THROWS_AS(st.step(q, {1.0, 2.0}, 1e-3), contract_error);
}

} // TEST_SUITE
