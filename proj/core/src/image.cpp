// SPDX-License-Identifier: Apache-2.0
#include "volsplat/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace volsplat {

namespace {

void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

void put_chunk(std::vector<unsigned char>& out, const char type[4],
               const unsigned char* data, std::size_t len) {
    put_be32(out, static_cast<std::uint32_t>(len));
    std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data, data + len);
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start)));
    put_be32(out, crc);
}

void write_file(const std::string& path, const void* data, std::size_t len) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw error("cannot open for writing: " + path);
    f.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    if (!f) throw error("write failed: " + path);
}

} // namespace

void write_png(const std::string& path, const Image& img) {
    if (img.width < 1 || img.height < 1)
        throw contract_error("write_png: empty image");

    // Scanlines: filter byte 0 + quantized row.
    std::vector<unsigned char> raw;
    raw.reserve(static_cast<std::size_t>(img.height) * (img.width + 1));
    for (int v = 0; v < img.height; ++v) {
        raw.push_back(0);
        for (int u = 0; u < img.width; ++u) {
            double x = std::clamp(img.at(u, v), 0.0, 1.0);
            raw.push_back(static_cast<unsigned char>(std::lround(x * 255.0)));
        }
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        throw error("write_png: zlib compression failed");
    compressed.resize(bound);

    std::vector<unsigned char> out;
    static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.insert(out.end(), sig, sig + 8);

    unsigned char ihdr[13];
    std::uint32_t w = static_cast<std::uint32_t>(img.width);
    std::uint32_t h = static_cast<std::uint32_t>(img.height);
    ihdr[0] = static_cast<unsigned char>(w >> 24);
    ihdr[1] = static_cast<unsigned char>(w >> 16);
    ihdr[2] = static_cast<unsigned char>(w >> 8);
    ihdr[3] = static_cast<unsigned char>(w);
    ihdr[4] = static_cast<unsigned char>(h >> 24);
    ihdr[5] = static_cast<unsigned char>(h >> 16);
    ihdr[6] = static_cast<unsigned char>(h >> 8);
    ihdr[7] = static_cast<unsigned char>(h);
    ihdr[8] = 8;  // bit depth
    ihdr[9] = 0;  // grayscale
    ihdr[10] = 0; // compression
    ihdr[11] = 0; // filter
    ihdr[12] = 0; // no interlace
    put_chunk(out, "IHDR", ihdr, sizeof(ihdr));
    put_chunk(out, "IDAT", compressed.data(), compressed.size());
    put_chunk(out, "IEND", nullptr, 0);

    write_file(path, out.data(), out.size());
}

void write_raw_f32(const std::string& path, const Image& img) {
    std::vector<float> buf(img.data.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(img.data[i]);
    write_file(path, buf.data(), buf.size() * sizeof(float));
}

} // namespace volsplat
