// Compiled with -mavx2 only (no FMA): each lane repeats the scalar kernel's
// operation sequence exactly.
#include <immintrin.h>

#include <cstddef>

#include "kernel_impl.hpp"

namespace optomech::kernels::detail {

namespace {

inline void store_interleaved(std::complex<double>* out, __m256d re, __m256d im) {
  const __m256d lo = _mm256_unpacklo_pd(re, im);  // r0 i0 r2 i2
  const __m256d hi = _mm256_unpackhi_pd(re, im);  // r1 i1 r3 i3
  double* d = reinterpret_cast<double*>(out);
  _mm256_storeu_pd(d, _mm256_permute2f128_pd(lo, hi, 0x20));
  _mm256_storeu_pd(d + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
}

inline void multimode_chi(const Prepared& p, __m256d nu, __m256d& re, __m256d& im) {
  const __m256d nu2 = _mm256_mul_pd(nu, nu);
  re = _mm256_setzero_pd();
  im = _mm256_setzero_pd();
  const std::size_t m = p.freq_sq.size();
  for (std::size_t k = 0; k < m; ++k) {
    const __m256d dr = _mm256_sub_pd(nu2, _mm256_set1_pd(p.freq_sq[k]));
    const __m256d di = _mm256_mul_pd(nu, _mm256_set1_pd(p.linewidth[k]));
    const __m256d den = _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(di, di));
    const __m256d s = _mm256_div_pd(_mm256_set1_pd(p.numerator[k]), den);
    re = _mm256_add_pd(re, _mm256_mul_pd(s, dr));
    im = _mm256_sub_pd(im, _mm256_mul_pd(s, di));
  }
}

}  // namespace

void transmission_avx2(const Prepared& p, const double* nu, std::complex<double>* out,
                       std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d h = _mm256_set1_pd(p.half_kappa);
  const __m256d h2 = _mm256_set1_pd(p.half_kappa_sq);
  const __m256d delta = _mm256_set1_pd(p.detuning);
  const __m256d g2 = _mm256_set1_pd(p.coupling_sq);
  const __m256d amp = _mm256_set1_pd(p.port_amplitude);
  const __m256d neg_amp = _mm256_sub_pd(zero, amp);

  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d v = _mm256_loadu_pd(nu + j);
    __m256d xr, xi;
    multimode_chi(p, v, xr, xi);

    const __m256d mr = _mm256_sub_pd(delta, v);
    const __m256d md = _mm256_add_pd(_mm256_mul_pd(mr, mr), h2);
    const __m256d cr = _mm256_div_pd(mr, md);
    const __m256d ci = _mm256_div_pd(h, md);

    const __m256d pr = _mm256_mul_pd(g2, xr);
    const __m256d pi = _mm256_mul_pd(g2, xi);
    const __m256d qr = _mm256_sub_pd(_mm256_mul_pd(pr, cr), _mm256_mul_pd(pi, ci));
    const __m256d qi = _mm256_add_pd(_mm256_mul_pd(pr, ci), _mm256_mul_pd(pi, cr));
    const __m256d dr = _mm256_sub_pd(one, qr);
    const __m256d di = _mm256_sub_pd(zero, qi);
    const __m256d dd = _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(di, di));
    const __m256d sr =
        _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(pr, dr), _mm256_mul_pd(pi, di)), dd);
    const __m256d si =
        _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(pi, dr), _mm256_mul_pd(pr, di)), dd);

    const __m256d er = _mm256_sub_pd(_mm256_add_pd(delta, v), sr);
    const __m256d ei = _mm256_sub_pd(h, si);
    const __m256d ed = _mm256_add_pd(_mm256_mul_pd(er, er), _mm256_mul_pd(ei, ei));
    const __m256d chr = _mm256_div_pd(er, ed);
    const __m256d chi = _mm256_div_pd(_mm256_sub_pd(zero, ei), ed);
    store_interleaved(out + j, _mm256_mul_pd(neg_amp, chi), _mm256_mul_pd(amp, chr));
  }
  if (j < n) transmission_scalar(p, nu + j, out + j, n - j);
}

void mech_effective_avx2(const Prepared& p, const double* nu, std::complex<double>* out,
                         std::size_t n, double scale) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d h = _mm256_set1_pd(p.half_kappa);
  const __m256d h2 = _mm256_set1_pd(p.half_kappa_sq);
  const __m256d delta = _mm256_set1_pd(p.detuning);
  const __m256d g2 = _mm256_set1_pd(p.coupling_sq);
  const __m256d sc = _mm256_set1_pd(scale);

  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d v = _mm256_loadu_pd(nu + j);
    __m256d xr, xi;
    multimode_chi(p, v, xr, xi);

    const __m256d ar = _mm256_add_pd(delta, v);
    const __m256d ad = _mm256_add_pd(_mm256_mul_pd(ar, ar), h2);
    const __m256d br = _mm256_sub_pd(delta, v);
    const __m256d bd = _mm256_add_pd(_mm256_mul_pd(br, br), h2);
    const __m256d sr = _mm256_add_pd(_mm256_div_pd(ar, ad), _mm256_div_pd(br, bd));
    const __m256d si = _mm256_sub_pd(_mm256_div_pd(h, bd), _mm256_div_pd(h, ad));

    const __m256d pr = _mm256_mul_pd(g2, xr);
    const __m256d pi = _mm256_mul_pd(g2, xi);
    const __m256d qr = _mm256_sub_pd(_mm256_mul_pd(pr, sr), _mm256_mul_pd(pi, si));
    const __m256d qi = _mm256_add_pd(_mm256_mul_pd(pr, si), _mm256_mul_pd(pi, sr));
    const __m256d dr = _mm256_sub_pd(one, qr);
    const __m256d di = _mm256_sub_pd(zero, qi);
    const __m256d dd = _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(di, di));
    const __m256d er =
        _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(xr, dr), _mm256_mul_pd(xi, di)), dd);
    const __m256d ei =
        _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(xi, dr), _mm256_mul_pd(xr, di)), dd);
    store_interleaved(out + j, _mm256_mul_pd(sc, er), _mm256_mul_pd(sc, ei));
  }
  if (j < n) mech_effective_scalar(p, nu + j, out + j, n - j, scale);
}

}  // namespace optomech::kernels::detail
