#pragma once

#include <numbers>

namespace squidmech::constants {

inline constexpr double pi = std::numbers::pi;

/// Magnetic flux quantum h/2e (Wb). Fixed, not configurable.
inline constexpr double flux_quantum = 2.067833848e-15;

inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double k_boltzmann = 1.380649e-23;        // J/K

}  // namespace squidmech::constants
