#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "dirs/errors.hpp"

// Little-endian binary primitives shared by the weight, demonstration and
// replay-buffer containers. Each container starts with a 4-byte tag and a
// u32 version so formats can evolve without silent misreads.

namespace dirs::io {

static_assert(std::endian::native == std::endian::little,
              "serialized containers assume a little-endian host");

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!os) throw IoError("write failed");
}

inline void read_bytes(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is) throw IoError("unexpected end of stream");
}

template <typename T>
void write_pod(std::ostream& os, T v) {
    write_bytes(os, &v, sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v;
    read_bytes(is, &v, sizeof(T));
    return v;
}

inline void write_f64_span(std::ostream& os, const std::vector<double>& v) {
    write_pod<std::uint64_t>(os, v.size());
    if (!v.empty()) write_bytes(os, v.data(), v.size() * sizeof(double));
}

inline std::vector<double> read_f64_span(std::istream& is) {
    auto n = read_pod<std::uint64_t>(is);
    std::vector<double> v(n);
    if (n) read_bytes(is, v.data(), n * sizeof(double));
    return v;
}

inline void write_i32_span(std::ostream& os, const std::vector<int>& v) {
    write_pod<std::uint64_t>(os, v.size());
    for (int x : v) write_pod<std::int32_t>(os, x);
}

inline std::vector<int> read_i32_span(std::istream& is) {
    auto n = read_pod<std::uint64_t>(is);
    std::vector<int> v(n);
    for (auto& x : v) x = read_pod<std::int32_t>(is);
    return v;
}

inline void write_tag(std::ostream& os, const char tag[4], std::uint32_t version) {
    write_bytes(os, tag, 4);
    write_pod<std::uint32_t>(os, version);
}

inline std::uint32_t read_tag(std::istream& is, const char tag[4]) {
    char got[4];
    read_bytes(is, got, 4);
    if (std::memcmp(got, tag, 4) != 0)
        throw IoError(std::string("bad container tag, expected ") + std::string(tag, 4));
    return read_pod<std::uint32_t>(is);
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    return os;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path.string());
    return is;
}

// FNV-1a, used for the scenario fingerprint embedded in demonstration files.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace dirs::io
