#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

namespace hybridsizer {

/// FNV-1a 64-bit content hash, used for config digests and manifest input
/// fingerprints (not cryptographic).
inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view text) {
    std::ostringstream out;
    out << std::hex << fnv1a64(text);
    return out.str();
}

/// Content hash of a file, or "unreadable" when it cannot be opened.
inline std::string file_digest_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "unreadable";
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a64_hex(buf.str());
}

}  // namespace hybridsizer
