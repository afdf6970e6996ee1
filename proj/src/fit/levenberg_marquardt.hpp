#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "optomech/fit.hpp"

namespace optomech::detail {

struct LmProblem {
  // Fills r for internal coordinates u; throws InvariantError if u is not a
  // valid model.
  std::function<void(const Eigen::VectorXd& u, Eigen::VectorXd& r)> residual;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd step;  // absolute forward-difference step per coordinate
};

struct LmOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  double step_tolerance = 1e-10;
  double cost_tolerance = 1e-12;
  // |r| at or below this is rounding noise: converged whatever the gradient says
  double residual_floor = 0.0;
};

struct LmOutcome {
  Eigen::VectorXd u;
  Eigen::VectorXd r;
  Eigen::MatrixXd jacobian;  // at u
  double cost = 0.0;
  double gradient = 0.0;
  int iterations = 0;
  FitStatus status = FitStatus::converged;
  std::string message;
  std::vector<double> cost_history;
};

void forward_jacobian(const LmProblem& problem, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& r, Eigen::MatrixXd& jacobian);
void central_jacobian(const LmProblem& problem, const Eigen::VectorXd& u,
                      Eigen::MatrixXd& jacobian);

LmOutcome levenberg_marquardt(const LmProblem& problem, const Eigen::VectorXd& start,
                              const LmOptions& options);

// sqrt(diag((J^T J)^-1) cost / dof), infinite along unidentified directions.
Eigen::VectorXd standard_errors(const Eigen::MatrixXd& jacobian, double cost, std::size_t dof);

}  // namespace optomech::detail
