#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace matwalk {

// weights live in log space end to end; -inf encodes weight zero.
// keeps products/sums stable across the e^{+-700} dynamic range
using LogWeight = double;

inline constexpr LogWeight log_zero() { return -std::numeric_limits<double>::infinity(); }
inline bool is_log_zero(LogWeight w) { return std::isinf(w) && w < 0; }

// log(sum exp(v)) with the max subtracted; empty input gives log(0)
inline LogWeight log_sum_exp(const std::vector<LogWeight>& v) {
    LogWeight m = log_zero();
    for (LogWeight x : v)
        if (x > m) m = x;
    if (is_log_zero(m)) return m;
    double s = 0.0;
    for (LogWeight x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// Kahan-compensated sum of exp(v - shift); caller picks shift (usually max)
inline double sum_exp_shifted(const std::vector<LogWeight>& v, LogWeight shift) {
    double s = 0.0, c = 0.0;
    for (LogWeight x : v) {
        double t = std::exp(x - shift) - c;
        double u = s + t;
        c = (u - s) - t;
        s = u;
    }
    return s;
}

}  // namespace matwalk
