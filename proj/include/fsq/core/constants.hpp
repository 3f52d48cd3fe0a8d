#pragma once

#include <numbers>

namespace fsq::constants {

// CODATA 2018 exact / recommended values, SI.
inline constexpr double pi = std::numbers::pi;
inline constexpr double h = 6.62607015e-34;
inline constexpr double hbar = h / (2.0 * pi);
inline constexpr double k_B = 1.380649e-23;
inline constexpr double mu_B = 9.2740100783e-24;  // J/T
inline constexpr double c = 299792458.0;
inline constexpr double epsilon_0 = 8.8541878128e-12;
inline constexpr double Z_0 = 376.730313668;  // vacuum impedance, ohm
inline constexpr double amu = 1.66053906660e-27;

/// One atomic unit of polarizability in C^2 m^2 / J.
inline constexpr double polarizability_au = 1.648777e-41;

/// Mass of 88Sr in atomic mass units.
inline constexpr double mass_sr88_u = 87.906;

inline constexpr double gauss = 1e-4;  // tesla
inline constexpr double nm = 1e-9;

inline constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

}  // namespace fsq::constants
