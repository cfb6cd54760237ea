// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "volsplat/phantom.hpp"
#include "volsplat/rng.hpp"
#include "volsplat/volume.hpp"

using namespace volsplat;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const char* name) : path(std::string("/tmp/volsplat_test_") + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

std::vector<unsigned char> read_file(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& p, const std::vector<unsigned char>& bytes) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    REQUIRE(f.good());
}

// Hand-assembled volume file, independent of the library's writer.
std::vector<unsigned char> craft_volume_file(const std::string& header,
                                             const std::vector<float>& payload) {
    std::vector<unsigned char> out = {'I', 'G', 'V', '1'};
    std::uint32_t h = static_cast<std::uint32_t>(header.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(h >> (8 * i)));
    out.insert(out.end(), header.begin(), header.end());
    for (float v : payload) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(u >> (8 * i)));
    }
    return out;
}

Volume small_volume() {
    Volume vol(3, 4, 5);
    for (int z = 0; z < 5; ++z)
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 3; ++x)
                vol.at(x, y, z) = static_cast<float>((x + 3 * y + 12 * z) / 59.0);
    vol.metadata["note"] = "small test volume";
    return vol;
}

} // namespace

TEST_SUITE("volume") {

TEST_CASE("constant volume round-trips bitwise") {
    Volume vol(2, 2, 2, 0.5f);
    TempFile tmp("const.igv");
    save_volume(tmp.path, vol);
    Volume back = load_volume(tmp.path);
    CHECK(back.nx == 2);
    CHECK(back.ny == 2);
    CHECK(back.nz == 2);
    REQUIRE(back.data.size() == 8);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(std::memcmp(&back.data[i], &vol.data[i], 4) == 0);
}

TEST_CASE("varied volume round-trips bitwise with metadata") {
    Volume vol = small_volume();
    TempFile tmp("varied.igv");
    save_volume(tmp.path, vol);
    Volume back = load_volume(tmp.path);
    REQUIRE(back.data.size() == vol.data.size());
    CHECK(std::memcmp(back.data.data(), vol.data.data(), 4 * vol.data.size()) == 0);
    CHECK(back.metadata.at("note") == "small test volume");
}

TEST_CASE("raw volumes rescale by (v - min) / (max - min)") {
    // min 100, max 300; the value 200 must land exactly on 0.5.
    std::vector<float> payload(8, 100.0f);
    payload[3] = 300.0f;
    payload[5] = 200.0f;
    std::string header = R"({"dims":[2,2,2],"dtype":"f32","order":"x-fastest","raw":true})";
    TempFile tmp("raw.igv");
    write_file(tmp.path, craft_volume_file(header, payload));

    Volume vol = load_volume(tmp.path);
    CHECK(vol.data[0] == 0.0f);
    CHECK(vol.data[3] == 1.0f);
    CHECK(vol.data[5] == 0.5f);
    CHECK(vol.metadata.at("raw_min") == std::to_string(100.0));
    CHECK(vol.metadata.at("raw_max") == std::to_string(300.0));
    vol.validate(); // rescaled values satisfy the [0,1] invariant
}

TEST_CASE("constant raw volume maps to zero instead of dividing by zero") {
    std::string header = R"({"dims":[2,2,2],"dtype":"f32","order":"x-fastest","raw":true})";
    TempFile tmp("rawconst.igv");
    write_file(tmp.path, craft_volume_file(header, std::vector<float>(8, 7.25f)));
    Volume vol = load_volume(tmp.path);
    for (float v : vol.data) CHECK(v == 0.0f);
}

TEST_CASE("missing file reports an io error, not a format error") {
    CHECK_THROWS_AS(load_volume("/tmp/volsplat_no_such_file.igv"), io_error);
}

TEST_CASE("bad magic is rejected with the byte offset") {
    Volume vol = small_volume();
    TempFile tmp("magic.igv");
    save_volume(tmp.path, vol);
    auto bytes = read_file(tmp.path);
    bytes[0] = 'X';
    write_file(tmp.path, bytes);
    CHECK_THROWS_WITH_AS(load_volume(tmp.path),
                         doctest::Contains("byte offset 0"), format_error);
}

TEST_CASE("truncated payload never yields a partial volume") {
    Volume vol = small_volume();
    TempFile tmp("trunc.igv");
    save_volume(tmp.path, vol);
    auto bytes = read_file(tmp.path);
    bytes.resize(bytes.size() - 10);
    write_file(tmp.path, bytes);
    CHECK_THROWS_WITH_AS(load_volume(tmp.path),
                         doctest::Contains("payload length mismatch"), format_error);
}

TEST_CASE("trailing garbage is rejected") {
    Volume vol = small_volume();
    TempFile tmp("trail.igv");
    save_volume(tmp.path, vol);
    auto bytes = read_file(tmp.path);
    bytes.push_back(0xAB);
    write_file(tmp.path, bytes);
    CHECK_THROWS_AS(load_volume(tmp.path), format_error);
}

TEST_CASE("header validation rejects wrong dtype, order, dims, and broken JSON") {
    TempFile tmp("hdr.igv");
    std::vector<float> payload(8, 0.5f);

    write_file(tmp.path, craft_volume_file(
        R"({"dims":[2,2,2],"dtype":"f64","order":"x-fastest","raw":false})", payload));
    CHECK_THROWS_WITH_AS(load_volume(tmp.path), doctest::Contains("dtype"), format_error);

    write_file(tmp.path, craft_volume_file(
        R"({"dims":[2,2,2],"dtype":"f32","order":"z-fastest","raw":false})", payload));
    CHECK_THROWS_WITH_AS(load_volume(tmp.path), doctest::Contains("order"), format_error);

    write_file(tmp.path, craft_volume_file(
        R"({"dims":[2,2],"dtype":"f32","order":"x-fastest","raw":false})", payload));
    CHECK_THROWS_WITH_AS(load_volume(tmp.path), doctest::Contains("dims"), format_error);

    write_file(tmp.path, craft_volume_file(
        R"({"dims":[1,2,4],"dtype":"f32","order":"x-fastest","raw":false})", payload));
    CHECK_THROWS_AS(load_volume(tmp.path), format_error);

    write_file(tmp.path, craft_volume_file("{not json", payload));
    CHECK_THROWS_WITH_AS(load_volume(tmp.path), doctest::Contains("JSON"), format_error);

    write_file(tmp.path, craft_volume_file(
        R"({"dtype":"f32","order":"x-fastest","raw":false})", payload));
    CHECK_THROWS_WITH_AS(load_volume(tmp.path), doctest::Contains("dims"), format_error);
}

TEST_CASE("header length pointing past the end of the file is rejected") {
    std::vector<unsigned char> bytes = {'I', 'G', 'V', '1', 0xFF, 0xFF, 0xFF, 0x7F, '{', '}'};
    TempFile tmp("hlen.igv");
    write_file(tmp.path, bytes);
    CHECK_THROWS_WITH_AS(load_volume(tmp.path), doctest::Contains("header length"), format_error);
}

TEST_CASE("normalized payloads outside [0,1] and NaN raw payloads are rejected") {
    TempFile tmp("vals.igv");
    std::vector<float> payload(8, 0.5f);
    payload[6] = 1.5f;
    write_file(tmp.path, craft_volume_file(
        R"({"dims":[2,2,2],"dtype":"f32","order":"x-fastest","raw":false})", payload));
    CHECK_THROWS_WITH_AS(load_volume(tmp.path), doctest::Contains("outside [0,1]"), format_error);

    payload[6] = std::nanf("");
    write_file(tmp.path, craft_volume_file(
        R"({"dims":[2,2,2],"dtype":"f32","order":"x-fastest","raw":true})", payload));
    CHECK_THROWS_WITH_AS(load_volume(tmp.path), doctest::Contains("not finite"), format_error);
}

TEST_CASE("validate enforces the volume invariants") {
    Volume ok(2, 3, 2, 0.25f);
    CHECK_NOTHROW(ok.validate());

    Volume thin(1, 3, 2, 0.25f);
    CHECK_THROWS_AS(thin.validate(), contract_error);

    Volume short_data(2, 3, 2, 0.25f);
    short_data.data.pop_back();
    CHECK_THROWS_AS(short_data.validate(), contract_error);

    Volume hot(2, 3, 2, 0.25f);
    hot.at(1, 2, 1) = 1.25f;
    CHECK_THROWS_AS(hot.validate(), contract_error);
}

} // TEST_SUITE

namespace {

// Independent re-derivation of the analytic phantom from its parameters.
// Deliberately written with scalar loops rather than the library's vector
// ops so a shared mistake cannot cancel out.
double oracle_nested(const PhantomParams& p, double wx, double wy, double wz) {
    double dims[3] = {double(p.nx), double(p.ny), double(p.nz)};
    double maxd = std::max(dims[0], std::max(dims[1], dims[2]));
    double w[3] = {wx, wy, wz};

    int hit = -1;
    for (int s = int(p.shells.size()) - 1; s >= 0 && hit < 0; --s) {
        const EllipsoidShell& sh = p.shells[std::size_t(s)];
        double q = 0.0;
        for (int a = 0; a < 3; ++a) { // local_a = column a of R dot (w - c)
            double local = 0.0;
            for (int b = 0; b < 3; ++b) local += sh.rotation(b, a) * (w[b] - sh.center[b]);
            q += (local / sh.semi_axes[a]) * (local / sh.semi_axes[a]);
        }
        if (q <= 1.0) hit = s;
    }

    if (hit == int(p.shells.size()) - 1 && hit >= 0)
        return p.shells[std::size_t(hit)].intensity;

    double ramp = 0.0;
    for (int a = 0; a < 3; ++a) ramp += p.gradient_dir[a] * (w[a] - 0.5 * dims[a]);
    double base = hit >= 0 ? p.shells[std::size_t(hit)].intensity : p.background;
    double v = base + p.gradient_amp * (ramp / maxd);
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

double oracle_checker(const PhantomParams& p, double wx, double wy, double wz) {
    double w[3] = {wx, wy, wz};
    double r2 = 0.0;
    for (int a = 0; a < 3; ++a)
        r2 += (w[a] - p.shell_center[a]) * (w[a] - p.shell_center[a]);
    double r = std::sqrt(r2);
    if (r >= p.outer_radius) return p.background;
    long long band = (long long)std::floor(r / p.band_width);
    double v = (band % 2 == 0) ? p.band_hi : p.band_lo;
    long long parity = 0;
    for (int a = 0; a < 3; ++a)
        parity += (long long)std::floor((w[a] + p.checker_offset[a]) / p.checker_period);
    v += (parity % 2 == 0) ? p.checker_amp : -p.checker_amp;
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

} // namespace

TEST_SUITE("phantom") {

TEST_CASE("same kind, dims, and seed give a bitwise-identical volume") {
    for (PhantomKind kind : {PhantomKind::nested_ellipsoids, PhantomKind::checker_shells}) {
        Volume a = make_phantom(kind, 18, 20, 16, 1234);
        Volume b = make_phantom(kind, 18, 20, 16, 1234);
        REQUIRE(a.data.size() == b.data.size());
        CHECK(std::memcmp(a.data.data(), b.data.data(), 4 * a.data.size()) == 0);

        Volume c = make_phantom(kind, 18, 20, 16, 1235);
        CHECK(std::memcmp(a.data.data(), c.data.data(), 4 * a.data.size()) != 0);
    }
}

TEST_CASE("center voxel carries exactly the innermost shell's intensity") {
    for (std::uint32_t seed : {1u, 7u, 42u, 99u, 1000u}) {
        PhantomParams p = phantom_params(PhantomKind::nested_ellipsoids, 32, 24, 40, seed);
        Volume vol = make_phantom(p);
        float expected = static_cast<float>(p.shells.back().intensity);
        CHECK(vol.at(16, 12, 20) == expected);
    }
}

TEST_CASE("shell count and intensities stay within their documented ranges") {
    for (std::uint32_t seed = 0; seed < 30; ++seed) {
        PhantomParams p = phantom_params(PhantomKind::nested_ellipsoids, 16, 16, 16, seed);
        CHECK(p.shells.size() >= 3);
        CHECK(p.shells.size() <= 6);
        for (std::size_t i = 0; i < p.shells.size(); ++i) {
            CHECK(p.shells[i].intensity >= 0.15);
            CHECK(p.shells[i].intensity <= 0.95);
            for (std::size_t j = i + 1; j < p.shells.size(); ++j)
                CHECK(std::abs(p.shells[i].intensity - p.shells[j].intensity) >= 0.079);
        }
        // Strict nesting: semi-axes shrink per axis going inward.
        for (std::size_t s = 1; s < p.shells.size(); ++s)
            for (int a = 0; a < 3; ++a)
                CHECK(p.shells[s].semi_axes[a] < p.shells[s - 1].semi_axes[a]);
    }
}

TEST_CASE("voxel values match an independent evaluation of the shell functions") {
    PhantomParams p = phantom_params(PhantomKind::nested_ellipsoids, 24, 18, 20, 77);
    Volume vol = make_phantom(p);
    for (int z = 0; z < p.nz; ++z)
        for (int y = 0; y < p.ny; ++y)
            for (int x = 0; x < p.nx; ++x) {
                double want = oracle_nested(p, x + 0.5, y + 0.5, z + 0.5);
                CHECK(std::abs(double(vol.at(x, y, z)) - want) < 1e-6);
            }
}

TEST_CASE("checker phantom matches its independent evaluation") {
    PhantomParams p = phantom_params(PhantomKind::checker_shells, 20, 20, 20, 5);
    Volume vol = make_phantom(p);
    for (int z = 0; z < p.nz; ++z)
        for (int y = 0; y < p.ny; ++y)
            for (int x = 0; x < p.nx; ++x) {
                double want = oracle_checker(p, x + 0.5, y + 0.5, z + 0.5);
                CHECK(std::abs(double(vol.at(x, y, z)) - want) < 1e-6);
            }
}

TEST_CASE("phantom volumes satisfy the volume invariants") {
    Volume a = make_phantom(PhantomKind::nested_ellipsoids, 16, 16, 16, 3);
    CHECK_NOTHROW(a.validate());
    Volume b = make_phantom(PhantomKind::checker_shells, 16, 16, 16, 3);
    CHECK_NOTHROW(b.validate());
}

TEST_CASE("small dims are rejected") {
    CHECK_THROWS_AS(phantom_params(PhantomKind::nested_ellipsoids, 15, 16, 16, 0), config_error);
    CHECK_THROWS_AS(make_phantom(PhantomKind::checker_shells, 16, 8, 16, 0), config_error);
}

} // TEST_SUITE
