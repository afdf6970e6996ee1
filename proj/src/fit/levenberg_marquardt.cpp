#include "levenberg_marquardt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optomech/errors.hpp"

namespace optomech::detail {

namespace {

constexpr double kInitialDamping = 1e-3;
constexpr double kMaxDamping = 1e16;

Eigen::VectorXd clamp(const Eigen::VectorXd& u, const LmProblem& p) {
  return u.cwiseMax(p.lower).cwiseMin(p.upper);
}

bool try_residual(const LmProblem& p, const Eigen::VectorXd& u, Eigen::VectorXd& r) {
  try {
    p.residual(u, r);
  } catch (const InvariantError&) {
    return false;
  }
  return r.allFinite();
}

// Scaled gradient, ignoring coordinates held at a bound by the descent direction.
double scaled_gradient(const Eigen::MatrixXd& J, const Eigen::VectorXd& r,
                       const std::vector<bool>& free_set) {
  const double rn = r.norm();
  if (rn == 0.0) return 0.0;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < J.cols(); ++j) {
    if (!free_set[j]) continue;
    const double cn = J.col(j).norm();
    worst = std::max(worst, std::abs(J.col(j).dot(r)) / (cn * rn));
  }
  return worst;
}

std::vector<bool> free_coordinates(const Eigen::VectorXd& u, const Eigen::VectorXd& grad,
                                   const LmProblem& p) {
  std::vector<bool> free_set(u.size(), true);
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    if (u[j] <= p.lower[j] && grad[j] > 0.0) free_set[j] = false;
    if (u[j] >= p.upper[j] && grad[j] < 0.0) free_set[j] = false;
  }
  return free_set;
}

}  // namespace

void forward_jacobian(const LmProblem& problem, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& r, Eigen::MatrixXd& jacobian) {
  const Eigen::Index n = u.size();
  jacobian.resize(r.size(), n);
  Eigen::VectorXd probe = u;
  Eigen::VectorXd rp(r.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    double h = problem.step[j];
    if (u[j] + h > problem.upper[j]) h = -h;
    probe[j] = u[j] + h;
    h = probe[j] - u[j];
    problem.residual(probe, rp);
    jacobian.col(j) = (rp - r) / h;
    probe[j] = u[j];
  }
}

void central_jacobian(const LmProblem& problem, const Eigen::VectorXd& u,
                      Eigen::MatrixXd& jacobian) {
  Eigen::VectorXd r0;
  problem.residual(u, r0);
  const Eigen::Index n = u.size();
  jacobian.resize(r0.size(), n);
  Eigen::VectorXd probe = u;
  Eigen::VectorXd a(r0.size()), b(r0.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = problem.step[j];
    if (u[j] - h >= problem.lower[j] && u[j] + h <= problem.upper[j]) {
      probe[j] = u[j] + h;
      problem.residual(probe, a);
      probe[j] = u[j] - h;
      problem.residual(probe, b);
      jacobian.col(j) = (a - b) / (2.0 * h);
    } else {
      // second-order one-sided stencil pointing into the box
      const double s = u[j] - h < problem.lower[j] ? h : -h;
      probe[j] = u[j] + s;
      problem.residual(probe, a);
      probe[j] = u[j] + 2.0 * s;
      problem.residual(probe, b);
      jacobian.col(j) = (4.0 * a - 3.0 * r0 - b) / (2.0 * s);
    }
    probe[j] = u[j];
  }
}

LmOutcome levenberg_marquardt(const LmProblem& problem, const Eigen::VectorXd& start,
                              const LmOptions& options) {
  LmOutcome out;
  out.u = clamp(start, problem);
  if (!try_residual(problem, out.u, out.r)) {
    throw InvariantError("model cannot be evaluated at the starting parameters");
  }
  out.cost = out.r.squaredNorm();
  out.cost_history.push_back(out.cost);
  forward_jacobian(problem, out.u, out.r, out.jacobian);

  double lambda = kInitialDamping;
  int slow_steps = 0;
  Eigen::VectorXd trial_r(out.r.size());

  while (true) {
    const Eigen::MatrixXd& J = out.jacobian;
    const Eigen::VectorXd grad = J.transpose() * out.r;
    const std::vector<bool> free_set = free_coordinates(out.u, grad, problem);
    for (Eigen::Index j = 0; j < J.cols(); ++j) {
      if (J.col(j).norm() == 0.0) {
        out.status = FitStatus::singular;
        out.gradient = std::numeric_limits<double>::infinity();
        out.message = "singular normal equations: coordinate " + std::to_string(j) +
                      " does not change the residuals";
        return out;
      }
    }
    out.gradient = scaled_gradient(J, out.r, free_set);
    if (out.cost == 0.0 || out.gradient <= options.gradient_tolerance) {
      out.status = FitStatus::converged;
      out.message = out.cost == 0.0 ? "exact fit" : "gradient below tolerance";
      return out;
    }
    if (std::sqrt(out.cost) <= options.residual_floor) {
      out.status = FitStatus::converged;
      out.message = "residual at rounding level";
      return out;
    }
    if (slow_steps >= 2) {
      out.status = FitStatus::stalled;
      out.message = "no further progress but gradient " + std::to_string(out.gradient) +
                    " above tolerance";
      return out;
    }
    if (out.iterations >= options.max_iterations) {
      out.status = FitStatus::max_iterations;
      out.message = "iteration limit reached";
      return out;
    }
    ++out.iterations;

    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < J.cols(); ++j) {
      if (free_set[j]) cols.push_back(j);
    }
    const Eigen::Index m = J.rows();
    const Eigen::Index k = static_cast<Eigen::Index>(cols.size());
    Eigen::VectorXd scale(k);
    Eigen::MatrixXd Js(m + k, k);
    Js.setZero();
    for (Eigen::Index c = 0; c < k; ++c) {
      scale[c] = 1.0 / J.col(cols[c]).norm();
      Js.block(0, c, m, 1) = J.col(cols[c]) * scale[c];
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + k);
    rhs.head(m) = -out.r;

    bool accepted = false;
    while (!accepted) {
      const double root = std::sqrt(lambda);
      for (Eigen::Index c = 0; c < k; ++c) Js(m + c, c) = root;
      const Eigen::VectorXd ds = Js.colPivHouseholderQr().solve(rhs);
      Eigen::VectorXd trial = out.u;
      for (Eigen::Index c = 0; c < k; ++c) trial[cols[c]] += scale[c] * ds[c];
      trial = clamp(trial, problem);

      double trial_cost = std::numeric_limits<double>::infinity();
      if (ds.allFinite() && try_residual(problem, trial, trial_r)) {
        trial_cost = trial_r.squaredNorm();
      }
      if (trial_cost < out.cost) {
        const Eigen::VectorXd du = trial - out.u;
        const double predicted = (J * du).norm() / out.r.norm();
        const double reduction = (out.cost - trial_cost) / out.cost;
        slow_steps = (predicted <= options.step_tolerance ||
                      reduction <= options.cost_tolerance)
                         ? slow_steps + 1
                         : 0;
        out.u = trial;
        out.r = trial_r;
        out.cost = trial_cost;
        out.cost_history.push_back(trial_cost);
        lambda = std::max(lambda * 0.3, 1e-15);
        forward_jacobian(problem, out.u, out.r, out.jacobian);
        accepted = true;
      } else {
        lambda *= 10.0;
        if (lambda > kMaxDamping) {
          if (std::sqrt(out.cost) <= options.residual_floor) {
            out.status = FitStatus::converged;
            out.message = "residual at rounding level";
            return out;
          }
          out.status = FitStatus::stalled;
          out.message = "no downhill step found; gradient " + std::to_string(out.gradient) +
                        " above tolerance";
          return out;
        }
      }
    }
  }
}

Eigen::VectorXd standard_errors(const Eigen::MatrixXd& jacobian, double cost, std::size_t dof) {
  const Eigen::Index n = jacobian.cols();
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd sigma = Eigen::VectorXd::Constant(n, inf);
  if (dof == 0) return sigma;
  Eigen::VectorXd scale(n);
  Eigen::MatrixXd Js = jacobian;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double c = jacobian.col(j).norm();
    scale[j] = c > 0.0 ? 1.0 / c : 0.0;
    Js.col(j) *= scale[j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Js, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::MatrixXd& V = svd.matrixV();
  const double cutoff = 1e-12 * (s.size() > 0 ? s[0] : 0.0);
  const double variance = cost / static_cast<double>(dof);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (scale[j] == 0.0) continue;
    double acc = 0.0;
    bool identified = true;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double v = V(j, i);
      if (s[i] <= cutoff) {
        if (std::abs(v) > 1e-8) identified = false;
        continue;
      }
      acc += v * v / (s[i] * s[i]);
    }
    if (identified) sigma[j] = scale[j] * std::sqrt(acc * variance);
  }
  return sigma;
}

}  // namespace optomech::detail
