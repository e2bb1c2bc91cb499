#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "ruinkit/errors.hpp"

namespace ruinkit {

// Shortest decimal string that parses back to exactly this value, capped at
// 12 significant digits. Byte-stable across runs: the same double always
// formats to the same text.
inline std::string format_number(double value) {
    char buf[64];
    const auto shortest = std::to_chars(buf, buf + sizeof(buf), value);
    std::string text(buf, shortest.ptr);
    int significant = 0;
    bool seen_nonzero = false;
    for (char ch : text) {
        if (ch == 'e' || ch == 'E') break;
        if (ch >= '1' && ch <= '9') {
            seen_nonzero = true;
            ++significant;
        } else if (ch == '0' && seen_nonzero) {
            ++significant;
        }
    }
    if (significant <= 12) return text;
    const auto capped = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
    return std::string(buf, capped.ptr);
}

// Write the whole file through a temp file in the same directory followed by
// a rename, so readers never observe a partial file and a failed run leaves
// no output behind.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open output file for writing: " + tmp);
        out << content;
        out.flush();
        if (!out) throw ConfigError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        std::filesystem::remove(tmp, ignore);
        throw ConfigError("cannot move output into place at " + path + ": " + ec.message());
    }
}

} // namespace ruinkit
