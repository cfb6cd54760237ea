// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "volsplat/gaussian.hpp"

namespace volsplat {

// Gaussian-cloud container format. Layout, all little-endian:
//   bytes 0..3    magic "IGS1"
//   bytes 4..11   u64 Gaussian count N
//   bytes 12..59  6 x f64 world bounds (lo.x, lo.y, lo.z, hi.x, hi.y, hi.z)
//   remainder     f32 parameter arrays back to back, in field order:
//                   mean (3N), log_scale (3N), rotation (4N, wxyz),
//                   opacity_raw (N), intensity_raw (N)
//                 The file ends exactly after the last array.
// A JSON sidecar at path + ".json" mirrors the header (count + bounds) for
// inspection; the binary file is authoritative and loading never reads the
// sidecar. Gradient accumulators are transient optimizer state and are not
// persisted.
//
// save throws io_error on write failure; load throws io_error when the file
// cannot be read and format_error (with the byte offset of the offending
// field) on bad magic, truncation, trailing bytes, non-finite values,
// zero-length quaternions, or invalid bounds. Round-trips are bitwise.
void save_checkpoint(const GaussianCloud& cloud, const std::string& path);
GaussianCloud load_checkpoint(const std::string& path);

} // namespace volsplat
