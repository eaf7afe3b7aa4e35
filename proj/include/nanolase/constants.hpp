// constants.hpp - physical constants (SI)
#pragma once

namespace nanolase {

inline constexpr double kSpeedOfLight = 2.99792458e8;    // m/s, exact
inline constexpr double kPlanck = 6.62607015e-34;        // J s, exact

}  // namespace nanolase
