#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "optomech/kernels.hpp"

namespace optomech::kernels::detail {

// Per-mode constants shared by every implementation, so that the scalar and
// vector paths start from identical operands.
struct Prepared {
  double detuning;
  double half_kappa;
  double half_kappa_sq;
  double port_amplitude;
  double coupling_sq;
  std::vector<double> freq_sq;    // Omega_i^2
  std::vector<double> linewidth;  // Gamma_i
  std::vector<double> numerator;  // 2 Omega_i w_i
};

Prepared prepare(const ResponseModel& model);

void transmission_scalar(const Prepared& p, const double* nu, std::complex<double>* out,
                         std::size_t n);
void mech_effective_scalar(const Prepared& p, const double* nu, std::complex<double>* out,
                           std::size_t n, double scale);

#if defined(OPTOMECH_HAVE_AVX2_KERNELS)
void transmission_avx2(const Prepared& p, const double* nu, std::complex<double>* out,
                       std::size_t n);
void mech_effective_avx2(const Prepared& p, const double* nu, std::complex<double>* out,
                         std::size_t n, double scale);
#endif

}  // namespace optomech::kernels::detail
