#pragma once

#include <cstdint>
#include <span>

#include "optomech/response.hpp"

namespace optomech {

/// Complex additive white Gaussian noise. sigma is the RMS magnitude of the
/// complex noise per point (each quadrature carries sigma / sqrt 2).
struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Counter-based generator: the k-th draw of a stream is SplitMix64's
// finalizer applied to seed + (k + 1) * 0x9E3779B97F4A7C15. Draw k depends on
// nothing but (seed, k), so any subset of points is reproducible.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter);
// Uniform on (0, 1] from the top 53 bits of counter_hash.
double counter_uniform(std::uint64_t seed, std::uint64_t counter);
// Standard complex normal (E|z|^2 = 1) for point k via Box-Muller over draws
// 2k and 2k + 1.
cplx complex_normal(std::uint64_t seed, std::uint64_t point);

double peak_magnitude(const ComplexTrace& trace);

ComplexTrace add_noise(const ComplexTrace& trace, const NoiseModel& noise);

// Model transmission over the grid plus noise; sigma = 0 returns trace() exactly.
ComplexTrace synthesize(const OptomechSystem& system, const DriveState& drive,
                        std::span<const double> grid, const NoiseModel& noise);

}  // namespace optomech
