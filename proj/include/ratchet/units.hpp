#pragma once

#include <cmath>
#include <numbers>

// All frequencies are ordinary frequencies in Hz. Angular quantities only
// appear inside the propagator and the Landau-Zener reference law, and are
// produced with the helpers below.
namespace ratchet::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double to_angular(double hz) noexcept { return two_pi * hz; }
constexpr double from_angular(double rad_per_s) noexcept { return rad_per_s / two_pi; }

inline constexpr double kHz = 1e3;
inline constexpr double MHz = 1e6;
inline constexpr double GHz = 1e9;
inline constexpr double mT = 1e-3;

// Standard-table values; the paper assumes them without quoting numbers.
inline constexpr double electron_gyromagnetic_ratio = 28.024 * GHz;  // Hz/T
inline constexpr double carbon13_gyromagnetic_ratio = 10.705 * MHz;  // Hz/T
inline constexpr double nv_zero_field_splitting = 2.87 * GHz;        // Hz

inline bool finite(double x) noexcept { return std::isfinite(x); }

}  // namespace ratchet::units
