#include "optomech/core.hpp"

#include <cmath>
#include <string>

#include "optomech/errors.hpp"
#include "optomech/units.hpp"

namespace optomech {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvariantError(what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

MechMode::MechMode(double frequency, double linewidth, double g0)
    : frequency_(frequency), linewidth_(linewidth), g0_(g0) {
  require(finite(frequency) && frequency > 0.0, "mechanical frequency must be positive");
  require(finite(linewidth) && linewidth > 0.0, "mechanical linewidth must be positive");
  require(linewidth < frequency, "mechanical linewidth must be below the mode frequency");
  require(finite(g0) && g0 >= 0.0, "single-photon coupling must be non-negative");
}

MechMode MechMode::from_hz(double frequency_hz, double linewidth_hz, double g0_hz) {
  return MechMode(hz_to_rad(frequency_hz), hz_to_rad(linewidth_hz), hz_to_rad(g0_hz));
}

Cavity::Cavity(double frequency, double kappa_port1, double kappa_port2, double kappa_internal)
    : frequency_(frequency),
      kappa_port1_(kappa_port1),
      kappa_port2_(kappa_port2),
      kappa_internal_(kappa_internal) {
  require(finite(frequency) && frequency > 0.0, "cavity frequency must be positive");
  require(finite(kappa_port1) && kappa_port1 >= 0.0, "kappa_port1 must be non-negative");
  require(finite(kappa_port2) && kappa_port2 >= 0.0, "kappa_port2 must be non-negative");
  require(finite(kappa_internal) && kappa_internal >= 0.0,
          "kappa_internal must be non-negative");
  require(kappa() > 0.0, "total cavity linewidth must be positive");
}

Cavity Cavity::from_hz(double frequency_hz, double kappa_port1_hz, double kappa_port2_hz,
                       double kappa_internal_hz) {
  return Cavity(hz_to_rad(frequency_hz), hz_to_rad(kappa_port1_hz), hz_to_rad(kappa_port2_hz),
                hz_to_rad(kappa_internal_hz));
}

double default_kerr_per_photon(const MechMode& fundamental) {
  return -2.0 * fundamental.g0() * fundamental.g0() / fundamental.frequency();
}

OptomechSystem::OptomechSystem(Cavity cavity, std::vector<MechMode> modes,
                               double thermal_occupancy, std::optional<double> kerr_per_photon,
                               double kinetic_shift_per_photon)
    : cavity_(cavity),
      modes_(std::move(modes)),
      thermal_occupancy_(thermal_occupancy),
      kerr_per_photon_(0.0),
      kinetic_shift_per_photon_(kinetic_shift_per_photon) {
  require(!modes_.empty(), "at least one mechanical mode is required");
  for (std::size_t i = 1; i < modes_.size(); ++i) {
    require(modes_[i].frequency() > modes_[i - 1].frequency(),
            "mechanical mode frequencies must be strictly increasing");
  }
  require(finite(thermal_occupancy) && thermal_occupancy >= 0.0,
          "thermal occupancy must be non-negative");
  require(finite(kinetic_shift_per_photon), "kinetic shift per photon must be finite");
  kerr_per_photon_ = kerr_per_photon.value_or(default_kerr_per_photon(modes_.front()));
  require(finite(kerr_per_photon_), "Kerr shift per photon must be finite");
}

OptomechSystem OptomechSystem::with_mode_count(std::size_t n) const {
  require(n >= 1 && n <= modes_.size(), "mode count out of range");
  OptomechSystem out = *this;
  out.modes_.resize(n, modes_.front());
  return out;
}

OptomechSystem OptomechSystem::with_cavity(Cavity cavity) const {
  OptomechSystem out = *this;
  out.cavity_ = cavity;
  return out;
}

OptomechSystem OptomechSystem::with_uncertainties(std::map<std::string, double> u) const {
  OptomechSystem out = *this;
  out.uncertainties_ = std::move(u);
  return out;
}

double parametric_coupling(double g0, double photon_number) {
  require(finite(g0) && g0 >= 0.0, "g0 must be non-negative");
  require(finite(photon_number) && photon_number >= 0.0, "photon number must be non-negative");
  return g0 * std::sqrt(photon_number);
}

double shifted_cavity_frequency(const OptomechSystem& system, double photon_number) {
  require(finite(photon_number) && photon_number >= 0.0, "photon number must be non-negative");
  return system.cavity().frequency() + system.shift_per_photon() * photon_number;
}

DriveState::DriveState(const OptomechSystem& system, double photon_number,
                       double drive_frequency)
    : photon_number_(photon_number),
      drive_frequency_(drive_frequency),
      cavity_frequency_(shifted_cavity_frequency(system, photon_number)) {
  require(finite(drive_frequency) && drive_frequency > 0.0, "drive frequency must be positive");
  couplings_.reserve(system.mode_count());
  for (const MechMode& m : system.modes()) {
    couplings_.push_back(parametric_coupling(m.g0(), photon_number));
  }
}

DriveState DriveState::at_detuning(const OptomechSystem& system, double photon_number,
                                   double detuning) {
  return DriveState(system, photon_number,
                    shifted_cavity_frequency(system, photon_number) + detuning);
}

DriveState DriveState::red_sideband(const OptomechSystem& system, double photon_number,
                                    bool track_detuning) {
  const double omega = system.fundamental().frequency();
  if (track_detuning) return at_detuning(system, photon_number, -omega);
  return DriveState(system, photon_number, system.cavity().frequency() - omega);
}

StaticShift static_radiation_pressure_shift(const OptomechSystem& system,
                                            double photon_number) {
  const MechMode& m = system.fundamental();
  const double g = parametric_coupling(m.g0(), photon_number);
  return {2.0 * m.g0() * photon_number / m.frequency(), -2.0 * g * g / m.frequency()};
}

Cooperativity cooperativity(const OptomechSystem& system, const DriveState& drive) {
  const double g = drive.coupling();
  const double c = 4.0 * g * g / (system.cavity().kappa() * system.fundamental().linewidth());
  return {c, c / system.thermal_occupancy()};
}

double photon_number_from_power(const OptomechSystem& system, double power_watts,
                                double drive_frequency) {
  constexpr double kHbar = 1.054571817e-34;
  require(finite(power_watts) && power_watts >= 0.0, "drive power must be non-negative");
  require(finite(drive_frequency) && drive_frequency > 0.0, "drive frequency must be positive");
  const Cavity& c = system.cavity();
  const double detuning = drive_frequency - c.frequency();
  return c.kappa_port1() * power_watts /
         (kHbar * drive_frequency * (detuning * detuning + 0.25 * c.kappa() * c.kappa()));
}

}  // namespace optomech
