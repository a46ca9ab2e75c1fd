#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace rplink {

/// Shortest decimal text that round-trips to the same double.
inline std::string fmt_shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Fixed number of significant digits (%.Ng).
inline std::string fmt_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

} // namespace rplink
