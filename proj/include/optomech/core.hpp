#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace optomech {

/// One mechanical mode: resonance frequency, intrinsic energy damping rate and
/// single-photon coupling, all in rad/s. Construction enforces
/// 0 < linewidth < frequency and g0 >= 0.
class MechMode {
 public:
  MechMode(double frequency, double linewidth, double g0);
  static MechMode from_hz(double frequency_hz, double linewidth_hz, double g0_hz);

  double frequency() const { return frequency_; }
  double linewidth() const { return linewidth_; }
  double g0() const { return g0_; }
  double quality_factor() const { return frequency_ / linewidth_; }

  friend bool operator==(const MechMode&, const MechMode&) = default;

 private:
  double frequency_;
  double linewidth_;
  double g0_;
};

/// Two-port cavity. The total linewidth is always the exact sum of the port
/// and internal rates.
class Cavity {
 public:
  Cavity(double frequency, double kappa_port1, double kappa_port2, double kappa_internal);
  static Cavity from_hz(double frequency_hz, double kappa_port1_hz, double kappa_port2_hz,
                        double kappa_internal_hz);

  double frequency() const { return frequency_; }
  double kappa_port1() const { return kappa_port1_; }
  double kappa_port2() const { return kappa_port2_; }
  double kappa_internal() const { return kappa_internal_; }
  double kappa() const { return kappa_port1_ + kappa_port2_ + kappa_internal_; }

  friend bool operator==(const Cavity&, const Cavity&) = default;

 private:
  double frequency_;
  double kappa_port1_;
  double kappa_port2_;
  double kappa_internal_;
};

/// Static device description. Modes are ordered by frequency; modes()[0] is
/// the fundamental and defines g0_1, Omega_1 for every single-mode formula.
///
/// The per-photon cavity shift is split into the optomechanical Kerr term
/// (default -2 g0_1^2 / Omega_1) and a kinetic-inductance term (default 0).
/// The effective mass and zero-point amplitude cancel out of every response
/// formula and are not stored.
class OptomechSystem {
 public:
  OptomechSystem(Cavity cavity, std::vector<MechMode> modes, double thermal_occupancy,
                 std::optional<double> kerr_per_photon = std::nullopt,
                 double kinetic_shift_per_photon = 0.0);

  const Cavity& cavity() const { return cavity_; }
  std::span<const MechMode> modes() const { return modes_; }
  const MechMode& fundamental() const { return modes_.front(); }
  std::size_t mode_count() const { return modes_.size(); }
  double thermal_occupancy() const { return thermal_occupancy_; }
  double kerr_per_photon() const { return kerr_per_photon_; }
  double kinetic_shift_per_photon() const { return kinetic_shift_per_photon_; }
  double shift_per_photon() const { return kerr_per_photon_ + kinetic_shift_per_photon_; }

  // kappa < Omega_1; reported, never enforced.
  bool resolved_sideband() const { return cavity_.kappa() < fundamental().frequency(); }

  // Keeps the first n modes (n >= 1). The Kerr coefficient is carried over
  // unchanged since it only depends on the fundamental.
  OptomechSystem with_mode_count(std::size_t n) const;
  OptomechSystem with_cavity(Cavity cavity) const;

  // Reported +- values (name -> one sigma in the same unit as the value).
  // Metadata only; nothing propagates them.
  const std::map<std::string, double>& uncertainties() const { return uncertainties_; }
  OptomechSystem with_uncertainties(std::map<std::string, double> u) const;

 private:
  Cavity cavity_;
  std::vector<MechMode> modes_;
  double thermal_occupancy_;
  double kerr_per_photon_;
  double kinetic_shift_per_photon_;
  std::map<std::string, double> uncertainties_;
};

/// Coherent drive: photon number and drive frequency. Detuning is measured
/// against the power-shifted cavity frequency, and the per-mode parametric
/// couplings are g_i = g0_i sqrt(n_d).
class DriveState {
 public:
  DriveState(const OptomechSystem& system, double photon_number, double drive_frequency);

  // Places the drive at the given detuning from the shifted cavity.
  static DriveState at_detuning(const OptomechSystem& system, double photon_number,
                                double detuning);
  // Delta = -Omega_1. With track_detuning the drive follows the power-shifted
  // cavity; without it the drive sits at omega_c - Omega_1 and the detuning
  // drifts with power.
  static DriveState red_sideband(const OptomechSystem& system, double photon_number,
                                 bool track_detuning = true);

  double photon_number() const { return photon_number_; }
  double drive_frequency() const { return drive_frequency_; }
  double cavity_frequency() const { return cavity_frequency_; }
  double detuning() const { return drive_frequency_ - cavity_frequency_; }
  std::span<const double> couplings() const { return couplings_; }
  double coupling() const { return couplings_.front(); }

 private:
  double photon_number_;
  double drive_frequency_;
  double cavity_frequency_;
  std::vector<double> couplings_;
};

double parametric_coupling(double g0, double photon_number);

double default_kerr_per_photon(const MechMode& fundamental);

double shifted_cavity_frequency(const OptomechSystem& system, double photon_number);

struct StaticShift {
  double displacement_zp;  // equilibrium displacement in units of x_zp
  double cavity_shift;     // rad/s
};

// Static radiation-pressure displacement and the accompanying cavity pull.
// Both are already absorbed into the redefined x and omega_c used by every
// response function.
StaticShift static_radiation_pressure_shift(const OptomechSystem& system, double photon_number);

struct Cooperativity {
  double classical;  // 4 g^2 / (kappa Gamma)
  double quantum;    // classical / n_th
};

Cooperativity cooperativity(const OptomechSystem& system, const DriveState& drive);

// Convenience only: mean intracavity photon number for a drive of the given
// power (W) injected through port 1, from the standard input-output relation
// n = kappa_1 P / (hbar omega_d (Delta^2 + kappa^2/4)).
double photon_number_from_power(const OptomechSystem& system, double power_watts,
                                double drive_frequency);

}  // namespace optomech
