// SPDX-License-Identifier: Apache-2.0
#include "volsplat/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "volsplat/errors.hpp"

namespace volsplat {

namespace {

nlohmann::json finite_or_inf(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

const char* axis_name(Axis a) {
    switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    default: return "z";
    }
}

} // namespace

std::string metric_report_json(const MetricReport& report) {
    nlohmann::json j;
    j["peak"] = report.peak;
    j["mean_psnr_db"] = finite_or_inf(report.mean_psnr);
    j["mean_ssim"] = report.mean_ssim;
    j["per_axis"] = nlohmann::json::array();
    for (int a = 0; a < 3; ++a) {
        if (report.axis_count[a] == 0) continue;
        j["per_axis"].push_back({{"axis", axis_name(static_cast<Axis>(a))},
                                 {"slices", report.axis_count[a]},
                                 {"psnr_db", finite_or_inf(report.axis_psnr[a])},
                                 {"ssim", report.axis_ssim[a]}});
    }
    j["slices"] = nlohmann::json::array();
    for (const auto& s : report.slices)
        j["slices"].push_back({{"axis", axis_name(s.axis)},
                               {"index", s.index},
                               {"t", s.t},
                               {"psnr_db", finite_or_inf(s.psnr_db)},
                               {"ssim", s.ssim}});
    return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw io_error("read failure on: " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open for writing: " + path);
    out << text;
    if (!out)
        throw io_error("short write to: " + path);
}

} // namespace volsplat
