#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace tapead::detail {

// printf-style rendering of one double, e.g. fixed(x, 3) or general(x, 6).
inline std::string fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    std::string s = buf;
    // "-0.000" reads as a sign error in tables
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') {
        s.erase(0, 1);
    }
    return s;
}

inline std::string general(double x, int significant) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, x);
    return buf;
}

// Shortest text that parses back to exactly x.
inline std::string shortest(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

} // namespace tapead::detail
