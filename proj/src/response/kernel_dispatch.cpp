#include <string>

#include "kernel_impl.hpp"
#include "optomech/errors.hpp"

namespace optomech::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(OPTOMECH_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() {
  static const Isa best = isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  return best;
}

namespace {

void check(std::span<const double> nu, std::span<std::complex<double>> out, Isa isa) {
  if (nu.size() != out.size()) throw InvariantError("kernel output size mismatch");
  if (!isa_supported(isa)) {
    throw InvariantError(std::string("kernel ISA not supported on this host: ") +
                         std::string(isa_name(isa)));
  }
}

}  // namespace

void transmission(const ResponseModel& model, std::span<const double> nu,
                  std::span<std::complex<double>> out, Isa isa) {
  check(nu, out, isa);
  const detail::Prepared p = detail::prepare(model);
#if defined(OPTOMECH_HAVE_AVX2_KERNELS)
  if (isa == Isa::avx2) {
    detail::transmission_avx2(p, nu.data(), out.data(), nu.size());
    return;
  }
#endif
  detail::transmission_scalar(p, nu.data(), out.data(), nu.size());
}

void mech_effective(const ResponseModel& model, std::span<const double> nu,
                    std::span<std::complex<double>> out, double scale, Isa isa) {
  check(nu, out, isa);
  const detail::Prepared p = detail::prepare(model);
#if defined(OPTOMECH_HAVE_AVX2_KERNELS)
  if (isa == Isa::avx2) {
    detail::mech_effective_avx2(p, nu.data(), out.data(), nu.size(), scale);
    return;
  }
#endif
  detail::mech_effective_scalar(p, nu.data(), out.data(), nu.size(), scale);
}

}  // namespace optomech::kernels
