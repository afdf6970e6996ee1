#pragma once

#include <numbers>

// Everything inside the library is angular frequency (rad/s). Cyclic
// frequency (Hz) only appears at file and CLI boundaries, through these two
// functions.
namespace optomech {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }
constexpr double rad_to_hz(double rad_per_s) { return rad_per_s / kTwoPi; }

}  // namespace optomech
