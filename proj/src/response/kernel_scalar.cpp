#include <cstddef>

#include "kernel_impl.hpp"

namespace optomech::kernels::detail {

Prepared prepare(const ResponseModel& model) {
  Prepared p;
  p.detuning = model.detuning;
  p.half_kappa = model.half_kappa;
  p.half_kappa_sq = model.half_kappa * model.half_kappa;
  p.port_amplitude = model.port_amplitude;
  p.coupling_sq = model.coupling_sq;
  p.freq_sq.reserve(model.modes.size());
  p.linewidth.reserve(model.modes.size());
  p.numerator.reserve(model.modes.size());
  for (const ModeTerm& m : model.modes) {
    p.freq_sq.push_back(m.frequency * m.frequency);
    p.linewidth.push_back(m.linewidth);
    p.numerator.push_back((2.0 * m.frequency) * m.weight);
  }
  return p;
}

namespace {

// chi_xN(nu) = sum_i w_i 2 Omega_i / (nu^2 - Omega_i^2 + i nu Gamma_i)
inline void multimode_chi(const Prepared& p, double nu, double& re, double& im) {
  const double nu2 = nu * nu;
  re = 0.0;
  im = 0.0;
  const std::size_t m = p.freq_sq.size();
  for (std::size_t k = 0; k < m; ++k) {
    const double dr = nu2 - p.freq_sq[k];
    const double di = nu * p.linewidth[k];
    const double den = dr * dr + di * di;
    const double s = p.numerator[k] / den;
    re = re + s * dr;
    im = im - s * di;
  }
}

}  // namespace

void transmission_scalar(const Prepared& p, const double* nu, std::complex<double>* out,
                         std::size_t n) {
  const double h = p.half_kappa;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = nu[j];
    double xr, xi;
    multimode_chi(p, v, xr, xi);

    // chi_a^*(2 omega_d - omega) = 1 / ((Delta - nu) - i kappa/2)
    const double mr = p.detuning - v;
    const double md = mr * mr + p.half_kappa_sq;
    const double cr = mr / md;
    const double ci = h / md;

    // X = g^2 chi_xN / (1 - g^2 chi_xN chi_a^*)
    const double pr = p.coupling_sq * xr;
    const double pi = p.coupling_sq * xi;
    const double qr = pr * cr - pi * ci;
    const double qi = pr * ci + pi * cr;
    const double dr = 1.0 - qr;
    const double di = 0.0 - qi;
    const double dd = dr * dr + di * di;
    const double sr = (pr * dr + pi * di) / dd;
    const double si = (pi * dr - pr * di) / dd;

    // chi_a,eff = 1 / (chi_a^-1 - X); T = i sqrt(k1 k2) chi_a,eff
    const double er = (p.detuning + v) - sr;
    const double ei = h - si;
    const double ed = er * er + ei * ei;
    const double chr = er / ed;
    const double chi = (0.0 - ei) / ed;
    out[j] = {(0.0 - p.port_amplitude) * chi, p.port_amplitude * chr};
  }
}

void mech_effective_scalar(const Prepared& p, const double* nu, std::complex<double>* out,
                           std::size_t n, double scale) {
  const double h = p.half_kappa;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = nu[j];
    double xr, xi;
    multimode_chi(p, v, xr, xi);

    // chi_a(omega_d + nu) + chi_a^*(omega_d - nu)
    const double ar = p.detuning + v;
    const double ad = ar * ar + p.half_kappa_sq;
    const double br = p.detuning - v;
    const double bd = br * br + p.half_kappa_sq;
    const double sr = ar / ad + br / bd;
    const double si = h / bd - h / ad;

    // chi_x,eff = chi_xN / (1 - g^2 chi_xN s)
    const double pr = p.coupling_sq * xr;
    const double pi = p.coupling_sq * xi;
    const double qr = pr * sr - pi * si;
    const double qi = pr * si + pi * sr;
    const double dr = 1.0 - qr;
    const double di = 0.0 - qi;
    const double dd = dr * dr + di * di;
    const double er = (xr * dr + xi * di) / dd;
    const double ei = (xi * dr - xr * di) / dd;
    out[j] = {scale * er, scale * ei};
  }
}

}  // namespace optomech::kernels::detail
