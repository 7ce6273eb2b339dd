#pragma once

namespace coexsim {

// CODATA 2018 exact values, pinned for bit-reproducible output.
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K

}  // namespace coexsim
