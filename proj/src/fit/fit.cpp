#include <algorithm>
#include <cmath>

#include "levenberg_marquardt.hpp"
#include "optomech/errors.hpp"
#include "optomech/fit.hpp"

namespace optomech {

namespace {

constexpr double kRoundingFloor = 1e-12;

struct Setup {
  ModelParameters base;
  std::vector<ParameterId> ids;
  detail::LmProblem problem;
  Eigen::VectorXd start;
};

double to_internal(const ParameterId& id, double v) { return id.log_scale() ? std::log(v) : v; }
double to_physical(const ParameterId& id, double u) { return id.log_scale() ? std::exp(u) : u; }

// Width of the narrowest spectral feature a linear coordinate moves, used to
// size its difference step.
double feature_width(const ModelParameters& p, const ParameterId& id) {
  const double kappa = p.kappa();
  const double g = p.effective_coupling();
  switch (id.kind) {
    case ParamKind::cavity_frequency: return 0.5 * kappa;
    case ParamKind::mech_frequency: {
      const MechTerm& m = p.modes.at(id.mode);
      return std::min(0.5 * kappa, m.linewidth + 4.0 * m.weight * g * g / kappa);
    }
    case ParamKind::mode_weight: return std::max(p.modes.at(id.mode).weight, 1e-2);
    case ParamKind::background_slope_re:
    case ParamKind::background_slope_im: return 1.0 / kappa;
    default: return 1.0;
  }
}

Setup make_setup(const ComplexTrace& trace, const ModelParameters& start, const FitConfig& config) {
  if (trace.quantity() != Quantity::transmission) {
    throw InvariantError("fit needs a transmission trace");
  }
  if (trace.size() == 0) throw InvariantError("fit needs a non-empty trace");
  if (!config.weights.empty() && config.weights.size() != trace.size()) {
    throw InvariantError("weights must match the trace length");
  }
  validate(start);
  validate(config, start);

  Setup s;
  s.base = start;
  const std::size_t n = config.parameters.size();
  s.problem.lower.resize(n);
  s.problem.upper.resize(n);
  s.problem.step.resize(n);
  s.start.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const ParameterSpec& spec = config.parameters[j];
    s.ids.push_back(spec.id);
    if (spec.initial) set_parameter(s.base, spec.id, *spec.initial);
  }
  validate(s.base);
  for (std::size_t j = 0; j < n; ++j) {
    const ParameterSpec& spec = config.parameters[j];
    s.problem.lower[j] = to_internal(spec.id, spec.lower);
    s.problem.upper[j] = to_internal(spec.id, spec.upper);
    s.start[j] = to_internal(spec.id, get_parameter(s.base, spec.id));
    s.problem.step[j] = spec.id.log_scale()
                            ? config.difference_step
                            : config.difference_step * feature_width(s.base, spec.id);
  }

  const ModelParameters base = s.base;
  const std::vector<ParameterId> ids = s.ids;
  const std::vector<double> weights = config.weights;
  const bool magnitude_only = config.magnitude_only;
  s.problem.residual = [base, ids, weights, magnitude_only, &trace](const Eigen::VectorXd& u,
                                                                   Eigen::VectorXd& r) {
    ModelParameters p = base;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      set_parameter(p, ids[j], to_physical(ids[j], u[static_cast<Eigen::Index>(j)]));
    }
    const std::vector<double> v = residuals(p, trace, {magnitude_only, weights});
    r = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  };
  return s;
}

ModelParameters apply(const Setup& s, const Eigen::VectorXd& u) {
  ModelParameters p = s.base;
  for (std::size_t j = 0; j < s.ids.size(); ++j) {
    set_parameter(p, s.ids[j], to_physical(s.ids[j], u[static_cast<Eigen::Index>(j)]));
  }
  return p;
}

FitResult run(const ComplexTrace& trace, const ModelParameters& start, const FitConfig& config) {
  const Setup s = make_setup(trace, start, config);
  double data_norm = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    data_norm += (config.weights.empty() ? 1.0 : config.weights[k]) * std::norm(trace.values()[k]);
  }
  const detail::LmOptions options{config.max_iterations, config.gradient_tolerance,
                                  config.step_tolerance, config.cost_tolerance,
                                  kRoundingFloor * std::sqrt(data_norm)};
  const detail::LmOutcome lm = detail::levenberg_marquardt(s.problem, s.start, options);

  FitResult result;
  result.model = apply(s, lm.u);
  result.cost = lm.cost;
  result.iterations = lm.iterations;
  result.status = lm.status;
  result.converged = lm.status == FitStatus::converged;
  result.message = lm.message;
  result.gradient = lm.gradient;
  result.cost_history = lm.cost_history;

  const std::size_t m = static_cast<std::size_t>(lm.r.size());
  const std::size_t n = s.ids.size();
  result.degrees_of_freedom = m > n ? m - n : 0;
  const Eigen::VectorXd sigma_u = detail::standard_errors(lm.jacobian, lm.cost,
                                                          result.degrees_of_freedom);
  for (std::size_t j = 0; j < n; ++j) {
    const ParameterId& id = s.ids[j];
    const double value = get_parameter(result.model, id);
    const double su = sigma_u[static_cast<Eigen::Index>(j)];
    result.parameters.push_back({id, value, id.log_scale() ? value * su : su});
  }

  const std::vector<cplx> model = evaluate(result.model, trace.frequencies());
  std::vector<cplx> diff(model.size());
  for (std::size_t k = 0; k < model.size(); ++k) diff[k] = model[k] - trace.values()[k];
  result.residual_trace =
      ComplexTrace(Quantity::transmission,
                   std::vector<double>(trace.frequencies().begin(), trace.frequencies().end()),
                   std::move(diff));
  return result;
}

// Pulls every varied parameter inside its bounds.
ModelParameters clamp_to_bounds(ModelParameters p, const FitConfig& config) {
  for (const ParameterSpec& spec : config.parameters) {
    set_parameter(p, spec.id, std::clamp(get_parameter(p, spec.id), spec.lower, spec.upper));
  }
  return p;
}

bool better(const FitResult& a, const FitResult& b) {
  if (a.converged != b.converged) return a.converged;
  return a.cost < b.cost;
}

}  // namespace

std::string_view fit_status_name(FitStatus s) {
  switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max_iterations";
    case FitStatus::singular: return "singular";
    case FitStatus::stalled: return "stalled";
  }
  return "unknown";
}

const FittedParameter* FitResult::find(const ParameterId& id) const {
  for (const FittedParameter& p : parameters) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

FitResult fit(const ComplexTrace& trace, const ModelParameters& start, const FitConfig& config) {
  FitResult best = run(trace, start, config);
  if (!config.auto_restart) return best;

  ModelParameters seeded = start;
  for (const ParameterSpec& spec : config.parameters) {
    if (spec.initial) set_parameter(seeded, spec.id, *spec.initial);
  }
  FitConfig restart = config;
  restart.auto_restart = false;
  for (ParameterSpec& spec : restart.parameters) spec.initial.reset();

  try {
    const InitialGuess guess = initial_guess(trace, start.modes.size(), start.drive_frequency);
    // Only varied parameters take the heuristic values; fixed ones stay as given.
    const ModelParameters guessed = apply_guess(guess, seeded);
    ModelParameters alt = seeded;
    for (const ParameterSpec& spec : restart.parameters) {
      set_parameter(alt, spec.id, get_parameter(guessed, spec.id));
    }
    FitResult second = run(trace, clamp_to_bounds(alt, restart), restart);
    if (better(second, best)) {
      second.message += " (restarted from initial_guess)";
      best = std::move(second);
    }
  } catch (const InvariantError&) {
  }

  // Higher modes absent from the data trap fits started with them switched on.
  ModelParameters dark = seeded;
  bool any_weight = false;
  for (const ParameterSpec& spec : restart.parameters) {
    if (spec.id.kind != ParamKind::mode_weight) continue;
    set_parameter(dark, spec.id, spec.lower);
    any_weight = true;
  }
  if (any_weight) {
    FitResult third = run(trace, dark, restart);
    if (better(third, best)) {
      third.message += " (restarted with higher modes off)";
      best = std::move(third);
    }
  }
  return best;
}

FitResult fit(const ComplexTrace& trace, const OptomechSystem& system, const DriveState& drive,
              const FitConfig& config) {
  return fit(trace, model_parameters(system, drive), config);
}

std::vector<double> residual_jacobian(const ComplexTrace& trace, const ModelParameters& start,
                                      const FitConfig& config, DifferenceScheme scheme) {
  const Setup s = make_setup(trace, start, config);
  Eigen::MatrixXd J;
  if (scheme == DifferenceScheme::forward) {
    Eigen::VectorXd r;
    s.problem.residual(s.start, r);
    detail::forward_jacobian(s.problem, s.start, r, J);
  } else {
    detail::central_jacobian(s.problem, s.start, J);
  }
  return std::vector<double>(J.data(), J.data() + J.size());
}

}  // namespace optomech
