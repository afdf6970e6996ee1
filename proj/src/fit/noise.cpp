#include "optomech/noise.hpp"

#include <cmath>

#include "optomech/errors.hpp"
#include "optomech/units.hpp"

namespace optomech {

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>((counter_hash(seed, counter) >> 11) + 1) * 0x1.0p-53;
}

cplx complex_normal(std::uint64_t seed, std::uint64_t point) {
  const double u1 = counter_uniform(seed, 2 * point);
  const double u2 = counter_uniform(seed, 2 * point + 1);
  // Box-Muller with E|z|^2 = 1, i.e. each quadrature has variance 1/2.
  const double r = std::sqrt(-std::log(u1));
  const double phase = kTwoPi * u2;
  return {r * std::cos(phase), r * std::sin(phase)};
}

double peak_magnitude(const ComplexTrace& trace) {
  double peak = 0.0;
  for (const cplx& v : trace.values()) peak = std::max(peak, std::abs(v));
  return peak;
}

ComplexTrace add_noise(const ComplexTrace& trace, const NoiseModel& noise) {
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) {
    throw InvariantError("noise sigma must be finite and non-negative");
  }
  if (noise.sigma == 0.0) return trace;
  std::vector<cplx> values(trace.values().begin(), trace.values().end());
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] += noise.sigma * complex_normal(noise.seed, k);
  }
  return ComplexTrace(trace.quantity(),
                      std::vector<double>(trace.frequencies().begin(), trace.frequencies().end()),
                      std::move(values));
}

ComplexTrace synthesize(const OptomechSystem& system, const DriveState& drive,
                        std::span<const double> grid, const NoiseModel& noise) {
  return add_noise(trace(system, drive, grid), noise);
}

}  // namespace optomech
