#pragma once

#include <charconv>
#include <string>

namespace uavplan {

// Shortest round-trip decimal form; keeps every text artifact byte-stable.
inline void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

inline std::string double_str(double v) {
    std::string s;
    append_double(s, v);
    return s;
}

}  // namespace uavplan
