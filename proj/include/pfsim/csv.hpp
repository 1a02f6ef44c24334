#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>

#include "pfsim/dynamics.hpp"

namespace pfsim {

/// Fixed-point with six decimals; infinities as `inf` / `-inf`.
inline std::string format_fixed6(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline constexpr const char* kCsvHeader = "t,share_R,share_U,share_NJ,n_exited,n_falsifying,mean_p,events";

inline void write_csv(std::span<const StepRecord> records, std::ostream& sink) {
    sink << kCsvHeader << '\n';
    for (const auto& r : records) {
        std::string events;
        for (const auto& label : r.events) {
            if (!events.empty()) events += ';';
            events += label;
        }
        sink << r.t << ',' << format_fixed6(r.share_R) << ',' << format_fixed6(r.share_U) << ','
             << format_fixed6(r.share_NJ) << ',' << r.n_exited << ',' << r.n_falsifying << ','
             << format_fixed6(r.mean_p) << ',' << events << '\n';
    }
    if (!sink) throw std::runtime_error("failed to write CSV");
}

} // namespace pfsim
