#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace normreg::detail {

// Full round-trip precision, for bulk numeric output.
inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Shortest decimal form that parses back to the same double; used where a
// human reads the value (names, parameter columns).
inline std::string fmt_short(double x) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

} // namespace normreg::detail
