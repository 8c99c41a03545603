#pragma once

#include <cmath>
#include <cstdint>

namespace nacs {

/// Simulation clock in integer microseconds.
using SimTime = std::int64_t;

constexpr SimTime kMicrosPerSecond = 1'000'000;

inline SimTime seconds_to_time(double s) { return static_cast<SimTime>(std::llround(s * 1e6)); }
inline double time_to_seconds(SimTime t) { return static_cast<double>(t) / 1e6; }

}  // namespace nacs
