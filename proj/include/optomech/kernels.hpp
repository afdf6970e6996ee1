#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

// Grid evaluators for the linear-response model. Every entry point has a
// scalar reference implementation and, on x86-64, an AVX2 variant selected
// at runtime. Both perform the same IEEE operations in the same order, so
// their outputs agree bit for bit (see tests/unit/test_kernels.cpp).
namespace optomech::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
// Widest supported ISA, detected once.
Isa best_isa();

struct ModeTerm {
  double frequency;  // Omega_i
  double linewidth;  // Gamma_i
  double weight;     // (g_i / g_1)^2
};

/// Drive-frame parameters consumed by the kernels. All grid arguments are
/// offsets nu = omega - omega_d from the drive.
struct ResponseModel {
  double detuning = 0.0;        // omega_d - omega_c (shifted cavity)
  double half_kappa = 0.0;      // kappa / 2
  double port_amplitude = 0.0;  // sqrt(kappa_1 kappa_2)
  double coupling_sq = 0.0;     // g_1^2
  std::vector<ModeTerm> modes;
};

// T(omega_d + nu) = i sqrt(k1 k2) chi_a,eff(omega_d + nu).
void transmission(const ResponseModel& model, std::span<const double> nu,
                  std::span<std::complex<double>> out, Isa isa = best_isa());

// scale * chi_x,eff(nu). scale = Omega_1 / 2 gives the normalized chi_m.
void mech_effective(const ResponseModel& model, std::span<const double> nu,
                    std::span<std::complex<double>> out, double scale = 1.0,
                    Isa isa = best_isa());

}  // namespace optomech::kernels
