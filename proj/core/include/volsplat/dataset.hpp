// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "volsplat/image.hpp"
#include "volsplat/slice.hpp"
#include "volsplat/types.hpp"
#include "volsplat/volume.hpp"

namespace volsplat {

enum class SplitLabel { train, test };

struct DatasetEntry {
    SliceSpec spec;
    Image image;
    int index_on_axis = 0; // voxel index k along spec.axis; spec.t = k + 0.5
    SplitLabel label = SplitLabel::train;
};

// Axis-aligned cross-sections of one volume. Entries are ordered by axis
// (x, y, z) and then by slice index; the world box is carried along so a
// Gaussian cloud can be initialized over the same domain.
struct SliceDataset {
    std::vector<DatasetEntry> entries;
    std::array<int, 3> axis_counts = {0, 0, 0};
    Box3 bounds;

    std::size_t size() const { return entries.size(); }
    int count(SplitLabel label) const;
    std::vector<const DatasetEntry*> with_label(SplitLabel label) const;
};

// One slice per voxel index along each requested axis. Slice pixels sample
// voxel centers: pitch 1, origin 0.5, t = k + 0.5, with the image's (u, v)
// axes following the cyclic frame of axis_permutation. Throws contract_error
// when axes is empty or has duplicates; the volume must pass validate().
SliceDataset extract_slices(const Volume& vol, const std::vector<Axis>& axes);

// Inverse of extract_slices for one axis: stacks that axis' slices back into
// a volume (bitwise, since f32 -> f64 -> f32 is exact). Throws contract_error
// if the dataset does not contain every index of that axis exactly once.
Volume reassemble_axis(const SliceDataset& ds, Axis axis);

// Marks a deterministic, evenly spaced test subset per axis: each axis with
// n slices contributes max(1, floor(n * test_fraction)) test slices at
// stride n / m with a seeded phase, the rest train. Throws config_error
// unless 0 < test_fraction < 0.5.
SliceDataset split_dataset(SliceDataset ds, double test_fraction, std::uint64_t seed);

} // namespace volsplat
