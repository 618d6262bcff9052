#pragma once

#include <numbers>

namespace doppler {

/// Physical constants (CODATA 2018) and unit conversions. Everything inside
/// the library is SI; the helpers below convert from the lab units used in
/// config files.
namespace constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double planck = 6.62607015e-34;           // J s (exact)
inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double boltzmann = 1.380649e-23;          // J/K (exact)
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J/T
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

}  // namespace constants

namespace units {

inline constexpr double gauss = 1e-4;              // T
inline constexpr double gauss_per_cm2 = 1.0;       // T/m^2 (1e-4 T / 1e-4 m^2)
inline constexpr double per_cm3 = 1e6;             // 1/m^3
inline constexpr double micrometre = 1e-6;         // m
inline constexpr double nanometre = 1e-9;          // m
inline constexpr double microkelvin = 1e-6;        // K
inline constexpr double megahertz = 1e6;           // Hz

}  // namespace units
}  // namespace doppler
