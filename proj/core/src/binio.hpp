// SPDX-License-Identifier: Apache-2.0
#pragma once

// Little-endian binary file helpers shared by the volume and checkpoint
// codecs. Readers track their byte offset so every rejection can name the
// exact position of the offending field.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "volsplat/errors.hpp"

namespace volsplat::detail {

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open for reading: " + path);
    in.seekg(0, std::ios::end);
    std::streamoff len = in.tellg();
    if (len < 0)
        throw io_error("cannot determine size of: " + path);
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> bytes(static_cast<std::size_t>(len));
    if (len > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), len))
        throw io_error("short read from: " + path);
    return bytes;
}

inline void write_file_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw io_error("short write to: " + path);
}

// Cursor over an in-memory file image. All multi-byte reads are explicit
// little-endian reassembly, so the codec is byte-order independent.
class ByteReader {
public:
    ByteReader(const std::vector<unsigned char>& bytes, std::string path)
        : bytes_(bytes), path_(std::move(path)) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    bool at_end() const { return pos_ == bytes_.size(); }

    [[noreturn]] void fail(const std::string& what) const {
        throw format_error(path_ + ": " + what + " (byte offset " + std::to_string(pos_) + ")");
    }
    [[noreturn]] void fail_at(std::size_t off, const std::string& what) const {
        throw format_error(path_ + ": " + what + " (byte offset " + std::to_string(off) + ")");
    }

    void need(std::size_t n, const char* what) {
        if (remaining() < n)
            fail(std::string("truncated ") + what + ": need " + std::to_string(n) +
                 " bytes, have " + std::to_string(remaining()));
    }

    void expect_magic(const char magic[4]) {
        need(4, "magic");
        if (std::memcmp(bytes_.data() + pos_, magic, 4) != 0)
            fail(std::string("bad magic, expected \"") + std::string(magic, 4) + "\"");
        pos_ += 4;
    }

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }

    double f64(const char* what) {
        std::uint64_t u = u64(what);
        double d;
        std::memcpy(&d, &u, 8);
        return d;
    }

    std::string text(std::size_t n, const char* what) {
        need(n, what);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    void f32_array(float* dst, std::size_t count, const char* what) {
        need(count * 4, what);
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t u = 0;
            for (int b = 0; b < 4; ++b)
                u |= static_cast<std::uint32_t>(bytes_[pos_ + 4 * i + b]) << (8 * b);
            std::memcpy(dst + i, &u, 4);
        }
        pos_ += count * 4;
    }

    void expect_eof(const char* what) {
        if (!at_end())
            fail(std::string("trailing bytes after ") + what + ": " +
                 std::to_string(remaining()) + " extra");
    }

private:
    const std::vector<unsigned char>& bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

class ByteWriter {
public:
    std::vector<unsigned char>& bytes() { return out_; }

    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void magic(const char m[4]) { raw(m, 4); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void f64(double d) {
        std::uint64_t u;
        std::memcpy(&u, &d, 8);
        u64(u);
    }
    void text(const std::string& s) { raw(s.data(), s.size()); }
    void f32_array(const float* src, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t u;
            std::memcpy(&u, src + i, 4);
            u32(u);
        }
    }

private:
    std::vector<unsigned char> out_;
};

} // namespace volsplat::detail
