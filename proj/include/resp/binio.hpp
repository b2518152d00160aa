#pragma once

// Little-endian binary readers/writers for the dataset and model file formats.
// The encodings are explicit byte shuffles, independent of host endianness.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "resp/errors.hpp"

namespace resp::binio {

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!os) throw io_error("write failed");
}

inline void write_u8(std::ostream& os, std::uint8_t v) { write_bytes(os, &v, 1); }

inline void write_u16(std::ostream& os, std::uint16_t v) {
    const std::uint8_t b[2] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8)};
    write_bytes(os, b, 2);
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
    std::uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    write_bytes(os, b, 4);
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    write_bytes(os, b, 8);
}

inline void write_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(os, bits);
}

inline void read_bytes(std::istream& is, void* p, std::size_t n, const char* what) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw io_error(std::string("truncated file: expected ") + what);
}

inline std::uint8_t read_u8(std::istream& is, const char* what = "u8") {
    std::uint8_t v;
    read_bytes(is, &v, 1, what);
    return v;
}

inline std::uint16_t read_u16(std::istream& is, const char* what = "u16") {
    std::uint8_t b[2];
    read_bytes(is, b, 2, what);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint32_t read_u32(std::istream& is, const char* what = "u32") {
    std::uint8_t b[4];
    read_bytes(is, b, 4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline std::uint64_t read_u64(std::istream& is, const char* what = "u64") {
    std::uint8_t b[8];
    read_bytes(is, b, 8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double read_f64(std::istream& is, const char* what = "f64") {
    const std::uint64_t bits = read_u64(is, what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

// f64 arrays dominate both file formats; bulk-copy them on little-endian hosts.
inline void write_f64_array(std::ostream& os, const double* p, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        write_bytes(os, p, n * 8);
    } else {
        for (std::size_t i = 0; i < n; ++i) write_f64(os, p[i]);
    }
}

inline void read_f64_array(std::istream& is, double* p, std::size_t n, const char* what) {
    if constexpr (std::endian::native == std::endian::little) {
        read_bytes(is, p, n * 8, what);
    } else {
        for (std::size_t i = 0; i < n; ++i) p[i] = read_f64(is, what);
    }
}

} // namespace resp::binio
