#pragma once

// printf-backed number formatting for the text artifacts.  Every emitted
// float goes through one of these so identical runs produce identical bytes.

#include <cstdio>
#include <string>

namespace iqr {

/// 17 significant digits, scientific: enough to round-trip any double.
inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

/// Shortest-ish general form with 17 significant digits; used where the
/// artifact is re-parsed (mesh coordinates) and must round-trip exactly.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace iqr
