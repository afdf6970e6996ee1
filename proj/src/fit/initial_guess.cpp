#include <algorithm>
#include <cmath>
#include <limits>

#include "optomech/errors.hpp"
#include "optomech/fit.hpp"

namespace optomech {

namespace {

struct Feature {
  std::size_t index;
  double prominence;
};

// Robust sigma of the point-to-point noise in m, from second differences.
double noise_level(const std::vector<double>& m) {
  if (m.size() < 5) return 0.0;
  std::vector<double> d;
  d.reserve(m.size() - 2);
  for (std::size_t k = 1; k + 1 < m.size(); ++k) d.push_back(std::abs(m[k + 1] - 2.0 * m[k] + m[k - 1]));
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2] / (0.6745 * std::sqrt(6.0));
}

std::vector<Feature> local_maxima(const std::vector<double>& m, double min_prominence) {
  std::vector<Feature> out;
  const std::size_t n = m.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(m[i] > m[i - 1] && m[i] >= m[i + 1])) continue;
    double left = m[i], right = m[i];
    for (std::size_t k = i; k-- > 0 && m[k] <= m[i];) left = std::min(left, m[k]);
    for (std::size_t k = i + 1; k < n && m[k] <= m[i]; ++k) right = std::min(right, m[k]);
    const double prominence = m[i] - std::max(left, right);
    if (prominence > min_prominence) out.push_back({i, prominence});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Feature& a, const Feature& b) { return a.prominence > b.prominence; });
  return out;
}

// Full width where m falls below level on both sides of index i, linearly
// interpolated. Sets clipped when the grid ends first.
double width_at(const std::vector<double>& m, std::span<const double> f, std::size_t i,
                double level, bool& clipped) {
  auto cross = [&](std::size_t a, std::size_t b) {
    const double t = (m[a] - level) / (m[a] - m[b]);
    return f[a] + t * (f[b] - f[a]);
  };
  double lo = f.front(), hi = f.back();
  bool lo_found = false, hi_found = false;
  for (std::size_t k = i; k > 0; --k) {
    if (m[k - 1] < level) {
      lo = cross(k, k - 1);
      lo_found = true;
      break;
    }
  }
  for (std::size_t k = i; k + 1 < m.size(); ++k) {
    if (m[k + 1] < level) {
      hi = cross(k, k + 1);
      hi_found = true;
      break;
    }
  }
  clipped = !lo_found || !hi_found;
  if (lo_found && !hi_found) return 2.0 * (f[i] - lo);
  if (hi_found && !lo_found) return 2.0 * (hi - f[i]);
  return hi - lo;
}

}  // namespace

InitialGuess initial_guess(const ComplexTrace& trace, std::size_t n_modes,
                           std::optional<double> drive_frequency) {
  if (trace.quantity() != Quantity::transmission) {
    throw InvariantError("initial_guess needs a transmission trace");
  }
  if (n_modes == 0) throw InvariantError("n_modes must be >= 1");
  const std::size_t n = trace.size();
  if (n < 3) throw InvariantError("trace too short to locate features");
  const std::span<const double> f = trace.frequencies();
  std::vector<double> m(n);
  for (std::size_t k = 0; k < n; ++k) m[k] = std::abs(trace.values()[k]);

  const auto top = std::max_element(m.begin(), m.end());
  const double peak = *top;
  const double floor = *std::min_element(m.begin(), m.end());
  if (!(peak > 0.0) || !(peak - floor > 1e-12 * peak) || !std::isfinite(peak)) {
    throw InvariantError("trace has no spectral features");
  }
  const double sigma = noise_level(m);
  const double level = peak / std::sqrt(2.0);

  InitialGuess g;
  g.peak_magnitude = peak;
  g.coupling = std::numeric_limits<double>::quiet_NaN();

  // Outer half-power crossings span the whole resonance, dips included.
  std::size_t first = 0, last = n - 1;
  while (m[first] < level) ++first;
  while (m[last] < level) --last;
  if (first == 0 || last == n - 1) g.flags.push_back("cavity response not bounded by the grid");
  const double outer = f[last] - f[first];
  g.cavity_frequency = 0.5 * (f[first] + f[last]);
  g.kappa = outer > 0.0 ? outer : f[1] - f[0];
  if (!drive_frequency) {
    g.cavity_frequency = f[static_cast<std::size_t>(top - m.begin())];
    g.flags.push_back("drive frequency unknown; mechanical features not assigned");
    return g;
  }
  const double wd = *drive_frequency;

  // Transmission zeros sit near the mechanical resonances.
  std::vector<double> inverted(n);
  for (std::size_t k = 0; k < n; ++k) inverted[k] = -m[k];
  std::vector<Feature> zeros = local_maxima(inverted, 0.25 * peak);
  std::erase_if(zeros, [&](const Feature& z) { return !(f[z.index] > wd); });
  std::stable_sort(zeros.begin(), zeros.end(),
                   [](const Feature& a, const Feature& b) { return a.index < b.index; });

  if (!zeros.empty()) {
    const std::size_t z = zeros.front().index;
    // Largest response below the zero: lower polariton, or the Lorentzian
    // shoulder of a narrow dip.
    std::size_t lower = 0;
    for (std::size_t k = 0; k < z; ++k) {
      if (m[k] > m[lower]) lower = k;
    }
    bool clip = false;
    const double lower_width = width_at(m, f, lower, m[lower] / std::sqrt(2.0), clip);
    const std::size_t next = zeros.size() > 1 ? zeros[1].index : n;
    const double right = *std::max_element(m.begin() + static_cast<std::ptrdiff_t>(z),
                                           m.begin() + static_cast<std::ptrdiff_t>(next));
    std::vector<double> depth(n);
    for (std::size_t k = 0; k < n; ++k) depth[k] = -m[k];
    const double half = -(m[z] + 0.5 * (std::min(m[lower], right) - m[z]));
    bool clipped = false;
    const double dip_width = width_at(depth, f, z, half, clipped);

    if (dip_width < lower_width) {
      // Weak coupling: a narrow absorption dip inside the Lorentzian.
      const double x = 2.0 * (f[z] - g.cavity_frequency) / g.kappa;
      const double envelope = peak / std::sqrt(1.0 + x * x);
      const double d = std::clamp(1.0 - m[z] / envelope, 0.0, 0.99);
      const double c = d / (1.0 - d);
      g.mech_frequencies.push_back(f[z] - wd);
      g.coupling = std::sqrt(c * g.kappa * (dip_width / (1.0 + c)) / 4.0);
    } else {
      // Strong coupling; each polariton carries about half of kappa.
      const double kappa = 2.0 * lower_width;
      if (clip) g.flags.push_back("lower polariton not bounded by the grid");
      const double w_minus = f[lower] - wd;
      const double q = kappa * kappa / 16.0;
      double omega = f[z] - wd;
      double coupling = 0.0;
      // The zero is pulled to Omega - g^2 / 2 Omega; iterate with the
      // inverse of Omega_-^2 = Omega^2 - q - 2 Omega sqrt(g^2 - q).
      for (int it = 0; it < 20; ++it) {
        const double r = (omega * omega - q - w_minus * w_minus) / (2.0 * omega);
        coupling = std::sqrt(std::max(r * r + q, q));
        omega = (f[z] - wd) + coupling * coupling / (2.0 * omega);
      }
      g.strong = true;
      g.kappa = kappa;
      g.coupling = coupling;
      g.cavity_frequency = wd + omega;
      g.mech_frequencies.push_back(omega);
      for (std::size_t k = 1; k < zeros.size() && g.mech_frequencies.size() < n_modes; ++k) {
        g.mech_frequencies.push_back(f[zeros[k].index] - wd);
      }
    }
  } else {
    // Shallow feature on the Lorentzian envelope (C below ~1/3).
    std::vector<double> rel(n, 0.0);
    std::size_t best = n;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = 2.0 * (f[k] - g.cavity_frequency) / g.kappa;
      if (std::abs(x) > 4.0) continue;
      rel[k] = std::abs(m[k] / (peak / std::sqrt(1.0 + x * x)) - 1.0);
      if (best == n || rel[k] > rel[best]) best = k;
    }
    const double threshold = std::max(6.0 * sigma, 1e-3 * peak) / peak;
    if (best == n || !(rel[best] > threshold) || !(f[best] > wd)) {
      g.flags.push_back("no mechanical feature resolved");
      return g;
    }
    bool clipped = false;
    const double width = width_at(rel, f, best, 0.5 * rel[best], clipped);
    const double d = std::min(rel[best], 0.99);
    const double c = d / (1.0 - d);
    g.mech_frequencies.push_back(f[best] - wd);
    g.coupling = std::sqrt(c * g.kappa * (width / (1.0 + c)) / 4.0);
  }
  if (g.mech_frequencies.size() < n_modes) {
    g.flags.push_back("found " + std::to_string(g.mech_frequencies.size()) + " of " +
                      std::to_string(n_modes) + " mechanical features");
  }
  return g;
}

ModelParameters apply_guess(const InitialGuess& guess, const ModelParameters& base) {
  ModelParameters p = base;
  if (std::isfinite(guess.cavity_frequency) && guess.cavity_frequency > 0.0) {
    p.cavity_frequency = guess.cavity_frequency;
    if (p.photon_number) {
      p.cavity_frequency -= p.shift_per_photon * (*p.photon_number - p.reference_photon_number);
    }
  }
  if (guess.kappa > 0.0 && std::isfinite(guess.kappa)) {
    const double s = guess.kappa / p.kappa();
    p.kappa_port1 *= s;
    p.kappa_port2 *= s;
    p.kappa_internal *= s;
  }
  for (std::size_t i = 0; i < guess.mech_frequencies.size() && i < p.modes.size(); ++i) {
    if (guess.mech_frequencies[i] > p.modes[i].linewidth) p.modes[i].frequency = guess.mech_frequencies[i];
  }
  if (guess.coupling > 0.0 && std::isfinite(guess.coupling)) {
    if (p.photon_number && p.g0 > 0.0) {
      const double old_n = *p.photon_number;
      const double r = guess.coupling / p.g0;
      p.photon_number = r * r;
      p.cavity_frequency -= p.shift_per_photon * (*p.photon_number - old_n);
    } else {
      p.coupling = guess.coupling;
    }
  }
  return p;
}

}  // namespace optomech
