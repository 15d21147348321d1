#pragma once

#include <cstdio>
#include <string>

namespace chainfis {

/// 17 significant digits: round-trips a double exactly in machine files.
inline std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// 4 significant digits for human summaries.
inline std::string format_brief(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace chainfis
