#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "optomech/errors.hpp"
#include "optomech/spectrum.hpp"

namespace optomech {

using cplx = std::complex<double>;

namespace {

constexpr cplx kI(0.0, 1.0);

void check_inputs(const EigenInputs& in) {
  if (!(in.mech_frequency > 0.0)) throw InvariantError("mechanical frequency must be positive");
  if (!(in.mech_linewidth >= 0.0)) throw InvariantError("mechanical linewidth must be >= 0");
  if (!(in.kappa >= 0.0)) throw InvariantError("kappa must be >= 0");
  if (!(in.coupling >= 0.0)) throw InvariantError("coupling must be >= 0");
  if (!std::isfinite(in.detuning)) throw InvariantError("detuning must be finite");
}

// Derivative of eigen_quartic with respect to lambda.
cplx quartic_derivative(cplx l, const EigenInputs& in) {
  const double w = in.mech_frequency;
  const cplx q1 = l * l + kI * in.mech_linewidth * l - w * w;
  const cplx dq1 = 2.0 * l + kI * in.mech_linewidth;
  const cplx a = l - in.detuning + 0.5 * kI * in.kappa;
  const cplx b = l + in.detuning + 0.5 * kI * in.kappa;
  return (dq1 * a * b + q1 * (a + b)) / (2.0 * w);
}

void finish(EigenSolution& s, const EigenInputs& in) {
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  const double w = in.mech_frequency;
  const double scale = w * w * w;
  double max_im = -INFINITY;
  for (std::size_t k = 0; k < 4; ++k) {
    s.damping_rates[k] = -s.eigenvalues[k].imag();
    s.residuals[k] = std::abs(eigen_quartic(s.eigenvalues[k], in)) / scale;
    max_im = std::max(max_im, s.eigenvalues[k].imag());
  }
  s.splitting = s.omega_plus - s.omega_minus;
  const double tol = kStabilityTolerance * w;
  if (max_im > tol) {
    s.stability = Stability::unstable;
  } else if (max_im >= -tol) {
    s.stability = Stability::marginal;
  } else {
    s.stability = Stability::stable;
  }
}

}  // namespace

std::string_view stability_name(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::marginal: return "marginal";
    case Stability::unstable: return "unstable";
  }
  return "unknown";
}

EigenInputs eigen_inputs(const OptomechSystem& system, const DriveState& drive) {
  return {system.fundamental().frequency(), system.fundamental().linewidth(),
          system.cavity().kappa(), drive.coupling(), drive.detuning()};
}

cplx eigen_quartic(cplx l, const EigenInputs& in) {
  const double w = in.mech_frequency;
  const cplx q1 = l * l - w * w + kI * in.mech_linewidth * l;
  const cplx a = l - in.detuning + 0.5 * kI * in.kappa;
  const cplx b = l + in.detuning + 0.5 * kI * in.kappa;
  return q1 / (2.0 * w) * a * b + 2.0 * in.detuning * in.coupling * in.coupling;
}

EigenSolution eigenvalues_closed_form(const EigenInputs& in) {
  check_inputs(in);
  const double w = in.mech_frequency;
  if (std::abs(in.detuning + w) > kClosedFormDetuningTolerance * w) {
    throw InvariantError(
        "closed-form eigenvalues need Delta = -Omega; use eigenvalues_numeric instead");
  }
  const double d = 0.25 * (in.kappa - in.mech_linewidth);
  const cplx centre(0.0, -0.25 * (in.kappa + in.mech_linewidth));
  const cplx inner = 2.0 * w * std::sqrt(cplx(in.coupling * in.coupling - d * d, 0.0));
  const cplx base(w * w - d * d, 0.0);
  const cplx r_plus = std::sqrt(base + inner);
  const cplx r_minus = std::sqrt(base - inner);

  EigenSolution s;
  s.eigenvalues = {centre + r_plus, centre + r_minus, centre - r_plus, centre - r_minus};
  s.omega_plus = std::max(0.0, (centre + r_plus).real());
  s.omega_minus = std::max(0.0, (centre + r_minus).real());
  if (s.omega_minus > s.omega_plus) std::swap(s.omega_plus, s.omega_minus);
  finish(s, in);
  return s;
}

EigenSolution eigenvalues_closed_form(const OptomechSystem& system, const DriveState& drive) {
  return eigenvalues_closed_form(eigen_inputs(system, drive));
}

EigenSolution eigenvalues_numeric(const EigenInputs& in) {
  check_inputs(in);
  const double w = in.mech_frequency;
  // 2W P(l) = (l^2 + a1 l + a0)(l^2 + b1 l + b0) + 4 W D g^2, in z = l / W.
  const cplx a1(0.0, in.mech_linewidth), a0(-w * w, 0.0);
  const cplx b1(0.0, in.kappa);
  const cplx b0(-0.25 * in.kappa * in.kappa - in.detuning * in.detuning, 0.0);
  const double w2 = w * w;
  const cplx c3 = (a1 + b1) / w;
  const cplx c2 = (a0 + b0 + a1 * b1) / w2;
  const cplx c1 = (a1 * b0 + a0 * b1) / (w2 * w);
  const cplx c0 = (a0 * b0 + 4.0 * w * in.detuning * in.coupling * in.coupling) / (w2 * w2);

  Eigen::Matrix4cd companion = Eigen::Matrix4cd::Zero();
  companion(0, 0) = -c3;
  companion(0, 1) = -c2;
  companion(0, 2) = -c1;
  companion(0, 3) = -c0;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(3, 2) = 1.0;

  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    throw SolverError("companion-matrix eigensolver did not converge");
  }

  EigenSolution s;
  for (int k = 0; k < 4; ++k) {
    cplx l = solver.eigenvalues()[k] * w;
    // Newton polish; keep a step only if it lowers the residual.
    for (int it = 0; it < 3; ++it) {
      const cplx p = eigen_quartic(l, in);
      const cplx dp = quartic_derivative(l, in);
      if (std::abs(dp) == 0.0) break;
      const cplx next = l - p / dp;
      if (!(std::abs(eigen_quartic(next, in)) < std::abs(p))) break;
      l = next;
    }
    if (!std::isfinite(l.real()) || !std::isfinite(l.imag())) {
      throw SolverError("quartic root is not finite");
    }
    s.eigenvalues[k] = l;
  }

  std::array<double, 4> re;
  for (int k = 0; k < 4; ++k) re[k] = s.eigenvalues[k].real();
  std::sort(re.begin(), re.end());
  s.omega_plus = std::max(0.0, re[3]);
  s.omega_minus = std::max(0.0, re[2]);
  finish(s, in);
  for (double r : s.residuals) {
    if (!(r < 1e-6)) {
      throw SolverError("quartic root residual too large: " + std::to_string(r));
    }
  }
  return s;
}

EigenSolution eigenvalues_numeric(const OptomechSystem& system, const DriveState& drive) {
  return eigenvalues_numeric(eigen_inputs(system, drive));
}

double splitting_approx(double coupling, double kappa) {
  if (!(coupling >= 0.0) || !(kappa >= 0.0)) {
    throw InvariantError("coupling and kappa must be non-negative");
  }
  const double q = 0.25 * kappa;
  if (!(coupling > q)) return 0.0;
  return 2.0 * std::sqrt(coupling * coupling - q * q);
}

MechFrequencies exact_mech_frequencies(double coupling, double kappa, double mech_frequency) {
  if (!(coupling >= 0.0) || !(kappa >= 0.0) || !(mech_frequency >= 0.0)) {
    throw InvariantError("coupling, kappa and mechanical frequency must be non-negative");
  }
  const double q2 = kappa * kappa / 16.0;
  const cplx inner = 2.0 * mech_frequency * std::sqrt(cplx(coupling * coupling - q2, 0.0));
  const cplx base(mech_frequency * mech_frequency - q2, 0.0);
  return {std::sqrt(base + inner).real(), std::sqrt(base - inner).real()};
}

double instability_threshold(double detuning, double kappa, double mech_frequency) {
  if (!(detuning < 0.0)) {
    throw InvariantError("instability threshold is defined for red detuning (Delta < 0)");
  }
  if (!(kappa >= 0.0) || !(mech_frequency > 0.0)) {
    throw InvariantError("kappa must be >= 0 and mechanical frequency > 0");
  }
  return std::sqrt(-(mech_frequency / (4.0 * detuning)) *
                   (detuning * detuning + 0.25 * kappa * kappa));
}

double critical_photon_number(const OptomechSystem& system) {
  const MechMode& m = system.fundamental();
  if (!(m.g0() > 0.0)) throw InvariantError("critical photon number needs g0 > 0");
  const double g = instability_threshold(-m.frequency(), system.cavity().kappa(), m.frequency());
  const double r = g / m.g0();
  return r * r;
}

}  // namespace optomech
