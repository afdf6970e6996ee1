#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "optomech/errors.hpp"
#include "optomech/spectrum.hpp"

namespace optomech {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  if (n == 0) return out;
  if (n == 1) return {lo};
  const double a = std::log(lo), b = std::log(hi);
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1)));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::sub_cooperative: return "sub-cooperative";
    case Regime::weak: return "weak";
    case Regime::quantum_enabled: return "quantum-enabled";
    case Regime::strong: return "strong";
    case Regime::ultrastrong: return "ultrastrong";
    case Regime::unstable: return "unstable";
    case Regime::off_sideband: return "off-sideband";
  }
  return "unknown";
}

RegimeInputs regime_inputs(const OptomechSystem& system, const DriveState& drive) {
  return {drive.coupling(),
          system.cavity().kappa(),
          system.fundamental().frequency(),
          system.fundamental().linewidth(),
          system.thermal_occupancy(),
          drive.detuning()};
}

RegimeReport classify_regime(const RegimeInputs& in) {
  if (!(in.kappa > 0.0) || !(in.mech_frequency > 0.0) || !(in.mech_linewidth > 0.0) ||
      !(in.coupling >= 0.0) || !(in.thermal_occupancy >= 0.0)) {
    throw InvariantError("regime classification needs positive rates and g >= 0");
  }
  const double g = in.coupling;
  const double w = in.mech_frequency;

  RegimeReport r;
  r.cooperativity = 4.0 * g * g / (in.kappa * in.mech_linewidth);
  r.quantum_cooperativity = in.thermal_occupancy > 0.0
                                ? r.cooperativity / in.thermal_occupancy
                                : std::numeric_limits<double>::infinity();
  r.strong_ratio = 4.0 * g / in.kappa;
  r.splitting_ratio = exact_mech_frequencies(g, in.kappa, w).splitting() / w;
  r.at_red_sideband = std::abs(in.detuning + w) <= kSidebandLabelTolerance * w;
  if (in.detuning < 0.0) {
    r.critical_coupling = instability_threshold(in.detuning, in.kappa, w);
    r.critical_ratio = g / r.critical_coupling;
  } else {
    r.critical_coupling = kNaN;
    r.critical_ratio = kNaN;
  }

  if (!r.at_red_sideband) {
    const EigenSolution s =
        eigenvalues_numeric(EigenInputs{w, in.mech_linewidth, in.kappa, g, in.detuning});
    r.regime = s.stability == Stability::unstable ? Regime::unstable : Regime::off_sideband;
    return r;
  }

  const bool strong = r.strong_ratio > 1.0;
  if (r.critical_ratio >= 1.0) {
    r.regime = Regime::unstable;
  } else if (strong && r.splitting_ratio > kUltrastrongSplittingFraction) {
    r.regime = Regime::ultrastrong;
  } else if (strong) {
    r.regime = Regime::strong;
  } else if (r.quantum_cooperativity >= 1.0) {
    r.regime = Regime::quantum_enabled;
  } else if (r.cooperativity >= 1.0) {
    r.regime = Regime::weak;
  } else {
    r.regime = Regime::sub_cooperative;
  }

  const std::pair<double, Regime> thresholds[] = {
      {r.cooperativity, Regime::weak},
      {r.quantum_cooperativity, Regime::quantum_enabled},
      {r.strong_ratio, Regime::strong},
      {r.splitting_ratio / kUltrastrongSplittingFraction, Regime::ultrastrong},
      {r.critical_ratio, Regime::unstable},
  };
  double best = std::log(kNearBoundaryFactor);
  for (const auto& [ratio, regime] : thresholds) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) continue;
    const double distance = std::abs(std::log(ratio));
    if (distance <= best) {
      best = distance;
      r.near_boundary = regime;
    }
  }
  return r;
}

RegimeReport classify_regime(const OptomechSystem& system, const DriveState& drive) {
  return classify_regime(regime_inputs(system, drive));
}

double ultrastrong_onset_coupling(double kappa, double mech_frequency) {
  const double target = kUltrastrongSplittingFraction * mech_frequency;
  const double lo0 = 0.25 * kappa;
  const double hi0 = instability_threshold(-mech_frequency, kappa, mech_frequency);
  auto excess = [&](double g) {
    return exact_mech_frequencies(g, kappa, mech_frequency).splitting() - target;
  };
  if (!(hi0 > lo0) || excess(hi0) < 0.0) return kNaN;
  double lo = lo0, hi = hi0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<BoundaryRow> regime_boundaries(double kappa_over_omega_min,
                                           double kappa_over_omega_max, std::size_t points) {
  if (!(kappa_over_omega_min > 0.0) || !(kappa_over_omega_max >= kappa_over_omega_min) ||
      points == 0) {
    throw InvariantError("boundary range must be positive and ordered");
  }
  std::vector<BoundaryRow> rows;
  for (double x : log_space(kappa_over_omega_min, kappa_over_omega_max, points)) {
    rows.push_back({x, 0.25 * x, ultrastrong_onset_coupling(x, 1.0),
                    0.5 * std::sqrt(1.0 + 0.25 * x * x)});
  }
  return rows;
}

std::vector<TrajectoryRow> device_trajectory(const OptomechSystem& system, double n_min,
                                             double n_max, std::size_t points) {
  if (!(n_min > 0.0) || !(n_max >= n_min)) {
    throw InvariantError("photon-number range must be positive and ordered");
  }
  const MechMode& m = system.fundamental();
  if (!(m.g0() > 0.0)) throw InvariantError("device trajectory needs g0 > 0");
  const double kappa = system.cavity().kappa();
  const double g0_sq = m.g0() * m.g0();
  const double n_c = kappa * m.linewidth() / (4.0 * g0_sq);
  const double onset = ultrastrong_onset_coupling(kappa, m.frequency());

  std::vector<std::pair<double, std::string_view>> samples;
  for (double n : log_space(n_min, n_max, points)) samples.emplace_back(n, "");
  const std::pair<double, std::string_view> events[] = {
      {n_c, "C=1"},
      {n_c * system.thermal_occupancy(), "Cq=1"},
      {kappa * kappa / (16.0 * g0_sq), "4g=kappa"},
      {onset * onset / g0_sq, "Omega_s=Omega/5"},
      {critical_photon_number(system), "instability"},
  };
  for (const auto& e : events) {
    if (std::isfinite(e.first) && e.first >= n_min && e.first <= n_max) samples.push_back(e);
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<TrajectoryRow> rows;
  rows.reserve(samples.size());
  for (const auto& [n, event] : samples) {
    const DriveState drive = DriveState::red_sideband(system, n, true);
    rows.push_back({n, drive.coupling(), classify_regime(system, drive), event});
  }
  return rows;
}

}  // namespace optomech
