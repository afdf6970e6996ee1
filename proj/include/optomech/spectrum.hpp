#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "optomech/core.hpp"

namespace optomech {

/// Single-mode parameters of the eigenvalue problem, rad/s.
struct EigenInputs {
  double mech_frequency = 0.0;
  double mech_linewidth = 0.0;
  double kappa = 0.0;
  double coupling = 0.0;
  double detuning = 0.0;
};

// Fundamental mode, fundamental coupling, drive detuning.
EigenInputs eigen_inputs(const OptomechSystem& system, const DriveState& drive);

enum class Stability { stable, marginal, unstable };

std::string_view stability_name(Stability s);

/// Four eigenvalues of the driven system, sorted by real part (ties by
/// imaginary part). Each evolves as e^{-i lambda t}.
struct EigenSolution {
  std::array<std::complex<double>, 4> eigenvalues{};
  std::array<double, 4> damping_rates{};  // -Im(lambda)
  std::array<double, 4> residuals{};      // |det M(lambda)| quartic, scaled by Omega^3
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double splitting = 0.0;
  Stability stability = Stability::stable;

  bool stable() const { return stability != Stability::unstable; }
};

// Im(lambda) above this fraction of Omega is unstable; |Im| within it of the
// real axis is marginal.
inline constexpr double kStabilityTolerance = 1e-9;

// Relative tolerance for |Delta + Omega| accepted as the red sideband by the
// closed form.
inline constexpr double kClosedFormDetuningTolerance = 1e-9;

// Value of the quartic ((l^2 - W^2 + i G l)/2W)(l - D + i k/2)(l + D + i k/2) + 2 D g^2.
std::complex<double> eigen_quartic(std::complex<double> lambda, const EigenInputs& in);

/// Closed-form roots at Delta = -Omega:
///   lambda_{+-,+-} = (k + G)/4i +- sqrt(W^2 - d^2 +- 2W sqrt(g^2 - d^2)),  d = (k - G)/4.
/// Exact up to a dropped Gamma^2/4 term, i.e. for a high-Q mechanical mode.
EigenSolution eigenvalues_closed_form(const EigenInputs& in);
EigenSolution eigenvalues_closed_form(const OptomechSystem& system, const DriveState& drive);

/// Roots of the quartic at any detuning, from the companion matrix followed
/// by Newton polishing. Throws SolverError if the eigensolver fails.
EigenSolution eigenvalues_numeric(const EigenInputs& in);
EigenSolution eigenvalues_numeric(const OptomechSystem& system, const DriveState& drive);

// Strong-coupling approximation 2 sqrt(g^2 - k^2/16), zero below g = k/4.
double splitting_approx(double coupling, double kappa);

struct MechFrequencies {
  double plus = 0.0;
  double minus = 0.0;
  double splitting() const { return plus - minus; }
};

// Omega_pm = Re sqrt(W^2 - k^2/16 +- 2W sqrt(g^2 - k^2/16)), principal branches.
MechFrequencies exact_mech_frequencies(double coupling, double kappa, double mech_frequency);

// Red-detuned instability threshold g_crit = sqrt(-(W / 4D)(D^2 + k^2/4)).
double instability_threshold(double detuning, double kappa, double mech_frequency);

// (g_crit / g0_1)^2 at Delta = -Omega_1.
double critical_photon_number(const OptomechSystem& system);

enum class Regime {
  sub_cooperative,
  weak,
  quantum_enabled,
  strong,
  ultrastrong,
  unstable,
  off_sideband,  // stable, but the drive is not at Delta = -Omega, so no label applies
};

std::string_view regime_name(Regime r);

struct RegimeInputs {
  double coupling = 0.0;
  double kappa = 0.0;
  double mech_frequency = 0.0;
  double mech_linewidth = 0.0;
  double thermal_occupancy = 0.0;
  double detuning = 0.0;
};

RegimeInputs regime_inputs(const OptomechSystem& system, const DriveState& drive);

/// Coupling regime plus every threshold quantity used to decide it.
struct RegimeReport {
  Regime regime = Regime::sub_cooperative;
  double cooperativity = 0.0;
  double quantum_cooperativity = 0.0;
  double strong_ratio = 0.0;       // 4g / kappa
  double splitting_ratio = 0.0;    // Omega_s / Omega, from exact_mech_frequencies
  double critical_coupling = 0.0;  // g_crit (NaN for Delta >= 0)
  double critical_ratio = 0.0;     // g / g_crit
  bool at_red_sideband = true;
  // Boundary whose threshold ratio lies within 10% of 1, if any. Holds the
  // regime entered when that threshold is crossed upward.
  std::optional<Regime> near_boundary;
};

// |Delta + Omega| / Omega accepted as "on the red sideband" for labelling.
inline constexpr double kSidebandLabelTolerance = 1e-3;
inline constexpr double kUltrastrongSplittingFraction = 0.2;  // Omega_s > Omega / 5
inline constexpr double kNearBoundaryFactor = 1.1;

RegimeReport classify_regime(const RegimeInputs& in);
RegimeReport classify_regime(const OptomechSystem& system, const DriveState& drive);

/// One row of the regime diagram in units of Omega: coupling at each boundary
/// for a given kappa / Omega. ultrastrong is NaN where Omega_s never reaches
/// Omega / 5 before the instability.
struct BoundaryRow {
  double kappa_over_omega = 0.0;
  double strong = 0.0;       // 4g = kappa
  double ultrastrong = 0.0;  // Omega_s = Omega / 5
  double stability = 0.0;    // 2g = sqrt(Omega^2 + kappa^2/4)
};

// Log-spaced in kappa / Omega over [min, max].
std::vector<BoundaryRow> regime_boundaries(double kappa_over_omega_min,
                                           double kappa_over_omega_max, std::size_t points);

// Coupling at which Omega_s = Omega / 5, or NaN.
double ultrastrong_onset_coupling(double kappa, double mech_frequency);

struct TrajectoryRow {
  double photon_number = 0.0;
  double coupling = 0.0;
  RegimeReport report;
  std::string_view event;  // boundary crossed exactly at this row, empty otherwise
};

/// Device path g = g0 sqrt(n_d) at Delta = -Omega through the regime diagram,
/// log-spaced in n_d, with the exact crossing points of C = 1, C_q = 1,
/// 4g = kappa, Omega_s = Omega/5 and the instability merged in.
std::vector<TrajectoryRow> device_trajectory(const OptomechSystem& system, double n_min,
                                             double n_max, std::size_t points);

}  // namespace optomech
