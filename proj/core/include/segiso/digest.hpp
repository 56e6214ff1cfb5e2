#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

#include "segiso/errors.hpp"

namespace segiso {

// FNV-1a 64-bit content digests. Used for change detection when deciding
// whether a pipeline stage can be skipped; not a cryptographic hash.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string digest_hex(std::uint64_t h) {
    std::ostringstream out;
    out << std::hex << std::setfill('0') << std::setw(16) << h;
    return out.str();
}

inline std::string digest_string(std::string_view bytes) {
    return digest_hex(fnv1a64(bytes));
}

inline std::string digest_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(Errc::io, "cannot open for digest: " + path.string());
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
        if (!in) break;
    }
    return digest_hex(h);
}

}  // namespace segiso
