// SPDX-License-Identifier: Apache-2.0
#include "volsplat/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "volsplat/rng.hpp"

namespace volsplat {

int SliceDataset::count(SplitLabel label) const {
    int n = 0;
    for (const auto& e : entries) n += (e.label == label) ? 1 : 0;
    return n;
}

std::vector<const DatasetEntry*> SliceDataset::with_label(SplitLabel label) const {
    std::vector<const DatasetEntry*> out;
    for (const auto& e : entries)
        if (e.label == label) out.push_back(&e);
    return out;
}

SliceDataset extract_slices(const Volume& vol, const std::vector<Axis>& axes) {
    vol.validate();
    if (axes.empty())
        throw contract_error("extract_slices: axes must be nonempty");
    bool seen[3] = {false, false, false};
    for (Axis a : axes) {
        if (seen[axis_index(a)])
            throw contract_error("extract_slices: duplicate axis in request");
        seen[axis_index(a)] = true;
    }

    SliceDataset ds;
    ds.bounds = vol.bounds();
    for (int ai = 0; ai < 3; ++ai) {
        if (!seen[ai]) continue;
        Axis axis = static_cast<Axis>(ai);
        auto perm = axis_permutation(axis);
        int n_t = vol.dim(perm[2]);
        int n_u = vol.dim(perm[0]);
        int n_v = vol.dim(perm[1]);
        ds.axis_counts[static_cast<std::size_t>(ai)] = n_t;
        for (int k = 0; k < n_t; ++k) {
            DatasetEntry e;
            e.index_on_axis = k;
            e.spec.axis = axis;
            e.spec.t = k + 0.5;
            e.spec.width = n_u;
            e.spec.height = n_v;
            e.spec.origin_u = 0.5;
            e.spec.origin_v = 0.5;
            e.spec.pitch = 1.0;
            e.image = Image(n_u, n_v);
            int idx[3];
            idx[perm[2]] = k;
            for (int v = 0; v < n_v; ++v) {
                idx[perm[1]] = v;
                for (int u = 0; u < n_u; ++u) {
                    idx[perm[0]] = u;
                    e.image.at(u, v) = vol.at(idx[0], idx[1], idx[2]);
                }
            }
            ds.entries.push_back(std::move(e));
        }
    }
    return ds;
}

Volume reassemble_axis(const SliceDataset& ds, Axis axis) {
    auto perm = axis_permutation(axis);
    int n_t = ds.axis_counts[static_cast<std::size_t>(axis_index(axis))];
    if (n_t < 2)
        throw contract_error("reassemble_axis: dataset has no slices along the requested axis");

    int dims[3] = {0, 0, 0};
    dims[perm[2]] = n_t;
    std::vector<const DatasetEntry*> by_index(static_cast<std::size_t>(n_t), nullptr);
    for (const auto& e : ds.entries) {
        if (e.spec.axis != axis) continue;
        if (e.index_on_axis < 0 || e.index_on_axis >= n_t ||
            by_index[static_cast<std::size_t>(e.index_on_axis)])
            throw contract_error("reassemble_axis: slice indices are not a clean partition");
        by_index[static_cast<std::size_t>(e.index_on_axis)] = &e;
        if (dims[perm[0]] == 0) {
            dims[perm[0]] = e.image.width;
            dims[perm[1]] = e.image.height;
        } else if (dims[perm[0]] != e.image.width || dims[perm[1]] != e.image.height) {
            throw contract_error("reassemble_axis: slice image shapes disagree");
        }
    }
    for (const auto* p : by_index)
        if (!p) throw contract_error("reassemble_axis: missing slice index along axis");

    Volume vol(dims[0], dims[1], dims[2]);
    int idx[3];
    for (int k = 0; k < n_t; ++k) {
        const DatasetEntry& e = *by_index[static_cast<std::size_t>(k)];
        idx[perm[2]] = k;
        for (int v = 0; v < e.image.height; ++v) {
            idx[perm[1]] = v;
            for (int u = 0; u < e.image.width; ++u) {
                idx[perm[0]] = u;
                vol.at(idx[0], idx[1], idx[2]) = static_cast<float>(e.image.at(u, v));
            }
        }
    }
    return vol;
}

SliceDataset split_dataset(SliceDataset ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 0.5))
        throw config_error("split_dataset: test_fraction must lie in (0, 0.5), got " +
                           std::to_string(test_fraction));

    for (auto& e : ds.entries) e.label = SplitLabel::train;

    for (int ai = 0; ai < 3; ++ai) {
        int n = ds.axis_counts[static_cast<std::size_t>(ai)];
        if (n <= 0) continue;
        int m = std::max(1, static_cast<int>(std::floor(n * test_fraction)));
        double stride = static_cast<double>(n) / m;
        // Per-axis generator so adding an axis never reshuffles the others.
        Rng rng(seed * 1315423911ull + static_cast<std::uint64_t>(ai) + 1);
        double phase = rng.uniform(0.0, stride);
        std::vector<bool> is_test(static_cast<std::size_t>(n), false);
        for (int j = 0; j < m; ++j) {
            int idx = static_cast<int>(std::floor(phase + j * stride));
            idx = std::clamp(idx, 0, n - 1);
            is_test[static_cast<std::size_t>(idx)] = true;
        }
        for (auto& e : ds.entries)
            if (axis_index(e.spec.axis) == ai && is_test[static_cast<std::size_t>(e.index_on_axis)])
                e.label = SplitLabel::test;
    }
    return ds;
}

} // namespace volsplat
