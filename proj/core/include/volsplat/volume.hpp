// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "volsplat/types.hpp"

namespace volsplat {

// Dense scalar volume. Voxel (i, j, k) covers the unit world cube
// [i, i+1) x [j, j+1) x [k, k+1); its center sits at (i+0.5, j+0.5, k+0.5),
// which is exactly where slice pixels sample. Values are float32 in [0, 1],
// stored x-fastest (index = x + nx * (y + ny * z)).
struct Volume {
    int nx = 0, ny = 0, nz = 0;
    std::vector<float> data;
    std::map<std::string, std::string> metadata;

    Volume() = default;
    Volume(int x, int y, int z, float fill = 0.0f)
        : nx(x), ny(y), nz(z),
          data(static_cast<std::size_t>(x) * y * z, fill) {}

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(nx) * (static_cast<std::size_t>(y) +
                                               static_cast<std::size_t>(ny) * z);
    }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }
    float at(int x, int y, int z) const { return data[index(x, y, z)]; }

    int dim(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
    std::size_t voxel_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }

    // World-space box the voxels tile.
    Box3 bounds() const {
        return {Vec3::Zero(), Vec3(static_cast<double>(nx), static_cast<double>(ny),
                                   static_cast<double>(nz))};
    }

    // Throws contract_error on dims < 2, length mismatch, or any value
    // outside [0, 1] (NaN included).
    void validate() const;
};

// Volume container format. Layout, all little-endian:
//   bytes 0..3   magic "IGV1"
//   bytes 4..7   u32 header length H
//   bytes 8..8+H JSON header:
//                  {"dims": [nx, ny, nz], "dtype": "f32",
//                   "order": "x-fastest", "raw": bool,
//                   "metadata": {string: string, ...}}
//   remainder    nx*ny*nz float32 values, x-fastest; file ends exactly here.
// When "raw" is true the payload carries unnormalized intensities; loading
// rescales by (v - min) / (max - min) and records raw_min/raw_max in
// metadata. (This is also the hook for external converters: write the
// foreign scanner data as a raw payload and loading normalizes it.)
//
// Throws io_error when the file cannot be read and format_error (with the
// byte offset of the offending field) on any structural or value problem;
// a rejected file never produces a partial Volume.
Volume load_volume(const std::string& path);

// Writes `vol` (which must pass validate()) with raw = false; loading the
// result returns a bitwise-identical Volume.
void save_volume(const std::string& path, const Volume& vol);

} // namespace volsplat
