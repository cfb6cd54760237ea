// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "volsplat/metrics.hpp"

namespace volsplat {

// Machine-readable evaluation report. Non-finite PSNR values (identical
// images) are emitted as the JSON string "inf" since JSON has no infinity
// literal; everything else is plain numbers.
std::string metric_report_json(const MetricReport& report);

// Whole-file text helpers used by report writers and the CLI.
std::string read_text_file(const std::string& path); // io_error on failure
void write_text_file(const std::string& path, const std::string& text);

} // namespace volsplat
