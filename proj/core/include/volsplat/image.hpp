// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "volsplat/errors.hpp"

namespace volsplat {

// Row-major grayscale image, double precision. Index as (u, v) with u the
// column (fast axis) and v the row, matching SliceSpec's (u, v) frame.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int u, int v) { return data[static_cast<std::size_t>(v) * width + u]; }
    double at(int u, int v) const { return data[static_cast<std::size_t>(v) * width + u]; }
    std::size_t size() const { return data.size(); }

    bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

inline void require_same_shape(const Image& a, const Image& b, const char* who) {
    if (!a.same_shape(b))
        throw contract_error(std::string(who) + ": image shapes differ (" +
                             std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                             std::to_string(b.width) + "x" + std::to_string(b.height) + ")");
}

// 8-bit grayscale PNG. Values are clamped to [0,1] then quantized; the file
// is a single IDAT with zlib default compression.
void write_png(const std::string& path, const Image& img);

// Raw float32 little-endian dump, row-major, no header.
void write_raw_f32(const std::string& path, const Image& img);

} // namespace volsplat
