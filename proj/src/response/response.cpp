#include "optomech/response.hpp"

#include <cmath>
#include <string>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

cplx reciprocal(double re, double im) {
  const double d = re * re + im * im;
  return {re / d, (0.0 - im) / d};
}

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw InvariantError("frequency grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw InvariantError("frequency grid contains non-finite values");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvariantError("frequency grid must be strictly increasing");
    }
  }
}

std::vector<double> drive_offsets(std::span<const double> grid, double drive_frequency) {
  std::vector<double> nu(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) nu[i] = grid[i] - drive_frequency;
  return nu;
}

}  // namespace

std::string_view quantity_name(Quantity q) {
  switch (q) {
    case Quantity::transmission: return "transmission";
    case Quantity::cavity_susceptibility: return "cavity_susceptibility";
    case Quantity::mech_susceptibility_normalized: return "mech_susceptibility_normalized";
  }
  return "unknown";
}

std::optional<Quantity> parse_quantity(std::string_view name) {
  for (Quantity q : {Quantity::transmission, Quantity::cavity_susceptibility,
                     Quantity::mech_susceptibility_normalized}) {
    if (quantity_name(q) == name) return q;
  }
  return std::nullopt;
}

ComplexTrace::ComplexTrace(Quantity quantity, std::vector<double> frequencies,
                           std::vector<cplx> values)
    : quantity_(quantity), frequencies_(std::move(frequencies)), values_(std::move(values)) {
  if (frequencies_.size() != values_.size()) {
    throw InvariantError("trace frequencies and values differ in length");
  }
  for (std::size_t i = 1; i < frequencies_.size(); ++i) {
    if (!(frequencies_[i] > frequencies_[i - 1])) {
      throw InvariantError("trace frequencies must be strictly increasing");
    }
  }
}

cplx chi_cavity(double omega, const Cavity& cavity) {
  return reciprocal(omega - cavity.frequency(), 0.5 * cavity.kappa());
}

cplx chi_mech(double omega, const MechMode& mode) {
  const double w = mode.frequency();
  const double dr = omega * omega - w * w;
  const double di = omega * mode.linewidth();
  const double s = (2.0 * w) / (dr * dr + di * di);
  return {s * dr, 0.0 - s * di};
}

cplx chi_mech_multimode(double omega, std::span<const MechMode> modes) {
  if (modes.empty()) throw InvariantError("at least one mechanical mode is required");
  const double g1 = modes.front().g0();
  if (!(g1 > 0.0)) throw InvariantError("multimode weights need a nonzero fundamental coupling");
  cplx sum = 0.0;
  for (const MechMode& m : modes) {
    const double r = m.g0() / g1;
    sum += (r * r) * chi_mech(omega, m);
  }
  return sum;
}

kernels::ResponseModel response_model(const OptomechSystem& system, const DriveState& drive) {
  const Cavity& c = system.cavity();
  kernels::ResponseModel model;
  model.detuning = drive.detuning();
  model.half_kappa = 0.5 * c.kappa();
  model.port_amplitude = std::sqrt(c.kappa_port1() * c.kappa_port2());
  model.coupling_sq = drive.coupling() * drive.coupling();

  const double g1 = system.fundamental().g0();
  model.modes.reserve(system.mode_count());
  for (const MechMode& m : system.modes()) {
    double weight;
    if (g1 > 0.0) {
      const double r = m.g0() / g1;
      weight = r * r;
    } else if (&m == &system.fundamental()) {
      weight = 1.0;
    } else if (m.g0() == 0.0) {
      weight = 0.0;
    } else {
      throw InvariantError("higher modes cannot couple when the fundamental g0 is zero");
    }
    model.modes.push_back({m.frequency(), m.linewidth(), weight});
  }
  return model;
}

cplx transmission(double omega, const OptomechSystem& system, const DriveState& drive) {
  const double nu = omega - drive.drive_frequency();
  cplx out;
  kernels::transmission(response_model(system, drive), std::span(&nu, 1), std::span(&out, 1),
                        kernels::Isa::scalar);
  return out;
}

cplx chi_cavity_effective(double omega, const OptomechSystem& system, const DriveState& drive) {
  // Unit port amplitude; the factor i is then undone exactly.
  kernels::ResponseModel model = response_model(system, drive);
  model.port_amplitude = 1.0;
  const double nu = omega - drive.drive_frequency();
  cplx out;
  kernels::transmission(model, std::span(&nu, 1), std::span(&out, 1), kernels::Isa::scalar);
  return cplx(out.imag(), -out.real());
}

cplx chi_mech_effective(double nu, const OptomechSystem& system, const DriveState& drive) {
  if (!(system.fundamental().g0() > 0.0)) {
    throw InvariantError("multimode weights need a nonzero fundamental coupling");
  }
  cplx out;
  kernels::mech_effective(response_model(system, drive), std::span(&nu, 1), std::span(&out, 1),
                          1.0, kernels::Isa::scalar);
  return out;
}

cplx chi_m(double nu, const OptomechSystem& system, const DriveState& drive) {
  return 0.5 * system.fundamental().frequency() * chi_mech_effective(nu, system, drive);
}

ComplexTrace trace(const OptomechSystem& system, const DriveState& drive,
                   std::span<const double> grid, kernels::Isa isa) {
  check_grid(grid);
  const std::vector<double> nu = drive_offsets(grid, drive.drive_frequency());
  std::vector<cplx> values(grid.size());
  kernels::transmission(response_model(system, drive), nu, values, isa);
  return ComplexTrace(Quantity::transmission, std::vector<double>(grid.begin(), grid.end()),
                      std::move(values));
}

ComplexTrace chi_m_trace(const OptomechSystem& system, const DriveState& drive,
                         std::span<const double> nu_grid, kernels::Isa isa) {
  check_grid(nu_grid);
  if (!(system.fundamental().g0() > 0.0)) {
    throw InvariantError("multimode weights need a nonzero fundamental coupling");
  }
  std::vector<cplx> values(nu_grid.size());
  kernels::mech_effective(response_model(system, drive), nu_grid, values,
                          0.5 * system.fundamental().frequency(), isa);
  return ComplexTrace(Quantity::mech_susceptibility_normalized,
                      std::vector<double>(nu_grid.begin(), nu_grid.end()), std::move(values));
}

ComplexTrace reconstruct_chi_m(const ComplexTrace& transmission_trace,
                               const OptomechSystem& system, const DriveState& drive) {
  if (transmission_trace.quantity() != Quantity::transmission) {
    throw InvariantError("chi_m reconstruction needs a transmission trace");
  }
  const double g = drive.coupling();
  if (!(g > 0.0)) throw InvariantError("chi_m reconstruction is singular at g = 0");
  const Cavity& c = system.cavity();
  const double amp = std::sqrt(c.kappa_port1() * c.kappa_port2());
  if (!(amp > 0.0)) throw InvariantError("chi_m reconstruction needs both ports coupled");

  const double half_kappa = 0.5 * c.kappa();
  const double prefactor = 0.5 * system.fundamental().frequency() / (g * g);
  const cplx i_amp(0.0, amp);

  std::vector<double> nu;
  std::vector<cplx> values;
  nu.reserve(transmission_trace.size());
  values.reserve(transmission_trace.size());
  for (std::size_t k = 0; k < transmission_trace.size(); ++k) {
    const double v = transmission_trace.frequencies()[k] - drive.drive_frequency();
    const cplx chi_a = reciprocal(drive.detuning() + v, half_kappa);
    const cplx ratio = transmission_trace.values()[k] / (i_amp * chi_a);
    nu.push_back(v);
    values.push_back(prefactor / chi_a * (ratio - 1.0));
  }
  return ComplexTrace(Quantity::mech_susceptibility_normalized, std::move(nu), std::move(values));
}

}  // namespace optomech
