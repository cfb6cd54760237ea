// SPDX-License-Identifier: Apache-2.0
#include "volsplat/volume.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include <nlohmann/json.hpp>

#include "binio.hpp"

namespace volsplat {

namespace {

constexpr char kMagic[4] = {'I', 'G', 'V', '1'};

} // namespace

void Volume::validate() const {
    if (nx < 2 || ny < 2 || nz < 2)
        throw contract_error("Volume: dims must be >= 2 per axis, got " + std::to_string(nx) +
                             "x" + std::to_string(ny) + "x" + std::to_string(nz));
    if (data.size() != voxel_count())
        throw contract_error("Volume: data length " + std::to_string(data.size()) +
                             " does not match dims product " + std::to_string(voxel_count()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        float v = data[i];
        if (!(v >= 0.0f && v <= 1.0f)) // NaN fails both comparisons
            throw contract_error("Volume: value at linear index " + std::to_string(i) +
                                 " is outside [0,1]: " + std::to_string(v));
    }
}

Volume load_volume(const std::string& path) {
    std::vector<unsigned char> bytes = detail::read_file_bytes(path);
    detail::ByteReader r(bytes, path);

    r.expect_magic(kMagic);
    std::size_t hlen_off = r.offset();
    std::uint32_t hlen = r.u32("header length");
    if (hlen > r.remaining())
        r.fail_at(hlen_off, "header length " + std::to_string(hlen) + " exceeds remaining " +
                                std::to_string(r.remaining()) + " bytes");

    std::size_t header_off = r.offset();
    std::string header_text = r.text(hlen, "JSON header");
    nlohmann::json header = nlohmann::json::parse(header_text, nullptr, false);
    if (header.is_discarded() || !header.is_object())
        r.fail_at(header_off, "header is not valid JSON");

    auto need_field = [&](const char* name) -> const nlohmann::json& {
        auto it = header.find(name);
        if (it == header.end())
            r.fail_at(header_off, std::string("header missing field \"") + name + "\"");
        return *it;
    };

    const auto& dims = need_field("dims");
    if (!dims.is_array() || dims.size() != 3 || !dims[0].is_number_integer() ||
        !dims[1].is_number_integer() || !dims[2].is_number_integer())
        r.fail_at(header_off, "header \"dims\" must be an array of 3 integers");
    std::int64_t dx = dims[0].get<std::int64_t>();
    std::int64_t dy = dims[1].get<std::int64_t>();
    std::int64_t dz = dims[2].get<std::int64_t>();
    if (dx < 2 || dy < 2 || dz < 2)
        r.fail_at(header_off, "header dims must be >= 2 per axis, got [" + std::to_string(dx) +
                                  ", " + std::to_string(dy) + ", " + std::to_string(dz) + "]");
    // Reject dims whose payload could not possibly fit in memory or the file.
    if (dx > (1 << 20) || dy > (1 << 20) || dz > (1 << 20) ||
        dx * dy > std::numeric_limits<std::int64_t>::max() / dz / 4)
        r.fail_at(header_off, "header dims are implausibly large");

    const auto& dtype = need_field("dtype");
    if (!dtype.is_string() || dtype.get<std::string>() != "f32")
        r.fail_at(header_off, "header \"dtype\" must be \"f32\"");
    const auto& order = need_field("order");
    if (!order.is_string() || order.get<std::string>() != "x-fastest")
        r.fail_at(header_off, "header \"order\" must be \"x-fastest\"");
    const auto& raw = need_field("raw");
    if (!raw.is_boolean())
        r.fail_at(header_off, "header \"raw\" must be a boolean");

    Volume vol;
    vol.nx = static_cast<int>(dx);
    vol.ny = static_cast<int>(dy);
    vol.nz = static_cast<int>(dz);

    if (auto it = header.find("metadata"); it != header.end()) {
        if (!it->is_object())
            r.fail_at(header_off, "header \"metadata\" must be an object of strings");
        for (const auto& [key, value] : it->items()) {
            if (!value.is_string())
                r.fail_at(header_off, "header metadata value for \"" + key + "\" must be a string");
            vol.metadata[key] = value.get<std::string>();
        }
    }

    std::size_t count = vol.voxel_count();
    std::size_t payload_off = r.offset();
    if (r.remaining() != count * 4)
        r.fail_at(payload_off, "payload length mismatch: dims imply " + std::to_string(count * 4) +
                                   " bytes, file has " + std::to_string(r.remaining()));
    vol.data.resize(count);
    r.f32_array(vol.data.data(), count, "payload");
    r.expect_eof("payload");

    if (raw.get<bool>()) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < count; ++i) {
            double v = vol.data[i];
            if (!std::isfinite(v))
                r.fail_at(payload_off + 4 * i, "raw payload value is not finite");
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double span = hi - lo;
        for (std::size_t i = 0; i < count; ++i)
            vol.data[i] = span > 0.0
                              ? static_cast<float>((static_cast<double>(vol.data[i]) - lo) / span)
                              : 0.0f;
        vol.metadata["raw_min"] = std::to_string(lo);
        vol.metadata["raw_max"] = std::to_string(hi);
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            float v = vol.data[i];
            if (!(v >= 0.0f && v <= 1.0f))
                r.fail_at(payload_off + 4 * i, "normalized payload value outside [0,1]");
        }
    }
    return vol;
}

void save_volume(const std::string& path, const Volume& vol) {
    vol.validate();

    nlohmann::json header;
    header["dims"] = {vol.nx, vol.ny, vol.nz};
    header["dtype"] = "f32";
    header["order"] = "x-fastest";
    header["raw"] = false;
    header["metadata"] = nlohmann::json::object();
    for (const auto& [k, v] : vol.metadata) header["metadata"][k] = v;
    std::string header_text = header.dump();

    detail::ByteWriter w;
    w.magic(kMagic);
    w.u32(static_cast<std::uint32_t>(header_text.size()));
    w.text(header_text);
    w.f32_array(vol.data.data(), vol.data.size());
    detail::write_file_bytes(path, w.bytes());
}

} // namespace volsplat
