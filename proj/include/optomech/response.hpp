#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "optomech/core.hpp"
#include "optomech/kernels.hpp"

namespace optomech {

using cplx = std::complex<double>;

enum class Quantity { transmission, cavity_susceptibility, mech_susceptibility_normalized };

std::string_view quantity_name(Quantity q);
std::optional<Quantity> parse_quantity(std::string_view name);

/// Sampled complex spectrum. Transmission and cavity susceptibility traces
/// carry absolute lab frequencies; normalized mechanical susceptibility traces
/// carry offsets from the drive.
class ComplexTrace {
 public:
  ComplexTrace(Quantity quantity, std::vector<double> frequencies, std::vector<cplx> values);

  Quantity quantity() const { return quantity_; }
  std::span<const double> frequencies() const { return frequencies_; }
  std::span<const cplx> values() const { return values_; }
  std::size_t size() const { return frequencies_.size(); }

  friend bool operator==(const ComplexTrace&, const ComplexTrace&) = default;

 private:
  Quantity quantity_;
  std::vector<double> frequencies_;
  std::vector<cplx> values_;
};

// Bare susceptibilities. Time convention e^{-i omega t}: lossy poles sit in
// the lower half plane.
cplx chi_cavity(double omega, const Cavity& cavity);          // 1/(w - w_c + i k/2)
cplx chi_mech(double omega, const MechMode& mode);            // 2W/(w^2 - W^2 + i w G)
cplx chi_mech_multimode(double omega, std::span<const MechMode> modes);

// Effective susceptibilities under the drive. chi_cavity_effective and
// transmission take the absolute lab frequency; chi_mech_effective and chi_m
// take the mechanical-frame frequency nu (offset from the drive).
cplx chi_cavity_effective(double omega, const OptomechSystem& system, const DriveState& drive);
cplx chi_mech_effective(double nu, const OptomechSystem& system, const DriveState& drive);
cplx chi_m(double nu, const OptomechSystem& system, const DriveState& drive);
cplx transmission(double omega, const OptomechSystem& system, const DriveState& drive);

// Flattened drive-frame view used by the grid kernels and the fitter.
kernels::ResponseModel response_model(const OptomechSystem& system, const DriveState& drive);

ComplexTrace trace(const OptomechSystem& system, const DriveState& drive,
                   std::span<const double> grid, kernels::Isa isa = kernels::best_isa());

// Normalized chi_m over a drive-relative grid.
ComplexTrace chi_m_trace(const OptomechSystem& system, const DriveState& drive,
                         std::span<const double> nu_grid,
                         kernels::Isa isa = kernels::best_isa());

/// Inverts a transmission trace for chi_m(omega - omega_d):
///   chi_m = Omega / (2 g^2 chi_a) * (T / (i sqrt(k1 k2) chi_a) - 1).
/// Output frequencies are drive-relative. Requires g > 0.
ComplexTrace reconstruct_chi_m(const ComplexTrace& transmission_trace,
                               const OptomechSystem& system, const DriveState& drive);

}  // namespace optomech
