#include <algorithm>
#include <cmath>

#include "optomech/errors.hpp"
#include "optomech/fit.hpp"

namespace optomech {

namespace {

void fill_row(SweepRow& row, const OptomechSystem& system) {
  const FitSummary sum = summarize_fit(row.fit, system);
  row.coupling = sum.coupling;
  row.coupling_sigma = sum.coupling_sigma;
  row.kappa = sum.kappa;
  row.frequencies = sum.frequencies;
  row.cooperativity = sum.cooperativity;
  row.regime = sum.report.regime;
}

}  // namespace

FitSummary summarize_fit(const FitResult& result, const OptomechSystem& device) {
  const double thermal_occupancy = device.thermal_occupancy();
  const double gamma = device.fundamental().linewidth();
  const ModelParameters& p = result.model;
  const MechTerm& m = p.modes.front();
  FitSummary sum;
  sum.coupling = p.effective_coupling();
  if (const FittedParameter* g = result.find({ParamKind::coupling, 0})) {
    sum.coupling_sigma = g->sigma;
  } else if (const FittedParameter* n = result.find({ParamKind::photon_number, 0})) {
    sum.coupling_sigma = n->value > 0.0 ? p.g0 * n->sigma / (2.0 * std::sqrt(n->value)) : 0.0;
  }
  sum.kappa = p.kappa();
  sum.frequencies = exact_mech_frequencies(sum.coupling, sum.kappa, m.frequency);
  const double c = 4.0 * sum.coupling * sum.coupling / (sum.kappa * gamma);
  sum.cooperativity = {c, thermal_occupancy > 0.0 ? c / thermal_occupancy : INFINITY};
  // A sideband offset within three sigma of zero is fit scatter, not detuning.
  sum.detuning = p.detuning();
  const FittedParameter* wc = result.find({ParamKind::cavity_frequency, 0});
  const FittedParameter* wm = result.find({ParamKind::mech_frequency, 0});
  if (wc && wm) {
    const double spread = 3.0 * std::hypot(wc->sigma, wm->sigma);
    if (std::abs(sum.detuning + m.frequency) <= spread) sum.detuning = -m.frequency;
  }
  sum.report = classify_regime(
      RegimeInputs{sum.coupling, sum.kappa, m.frequency, gamma, thermal_occupancy, sum.detuning});
  return sum;
}

std::vector<SweepRow> power_sweep_extract(std::span<const SweepPoint> points,
                                          const OptomechSystem& system,
                                          const SweepOptions& options) {
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (!(points[k].photon_number >= points[k - 1].photon_number)) {
      throw InvariantError("sweep points must be ordered by drive strength");
    }
  }
  const double f = options.kappa_bound_factor;
  if (!(f > 1.0) || !std::isfinite(f)) throw InvariantError("kappa_bound_factor must exceed 1");
  const Cavity& cav = system.cavity();

  std::vector<SweepRow> rows;
  std::optional<ModelParameters> previous;
  double previous_n = 0.0;
  for (const SweepPoint& point : points) {
    SweepRow row;
    row.photon_number = point.photon_number;
    try {
      const double n = point.photon_number;
      ModelParameters start;
      if (options.warm_start && previous && previous_n > 0.0) {
        start = *previous;
        start.drive_frequency = point.drive_frequency;
        if (start.photon_number) {
          *start.photon_number *= n / previous_n;
        } else {
          start.coupling *= std::sqrt(n / previous_n);
          start.cavity_frequency += start.shift_per_photon * (n - previous_n);
        }
      } else {
        start = model_parameters(system, DriveState(system, n, point.drive_frequency));
      }
      if (options.fit_options.fit_photon_number && !start.photon_number) {
        start.photon_number = n;
        start.reference_photon_number = n;
      }

      FitConfig config = default_fit_config(start, options.fit_options);
      for (ParameterSpec& spec : config.parameters) {
        double k0 = 0.0;
        if (spec.id.kind == ParamKind::kappa_port1) k0 = cav.kappa_port1();
        if (spec.id.kind == ParamKind::kappa_port2) k0 = cav.kappa_port2();
        if (spec.id.kind == ParamKind::kappa_internal) k0 = cav.kappa_internal();
        if (k0 > 0.0) {
          spec.lower = k0 / f;
          spec.upper = k0 * f;
          set_parameter(start, spec.id, std::clamp(get_parameter(start, spec.id), spec.lower,
                                                   spec.upper));
        }
      }
      for (const ParameterSpec& spec : config.parameters) {
        if (spec.id.kind == ParamKind::kappa_port1 || spec.id.kind == ParamKind::kappa_port2 ||
            spec.id.kind == ParamKind::kappa_internal) {
          row.kappa_lower += spec.lower;
          row.kappa_upper += spec.upper;
        }
      }
      if (!options.fit_options.fit_port2) {
        row.kappa_lower += start.kappa_port2;
        row.kappa_upper += start.kappa_port2;
      }
      config.max_iterations = options.solver.max_iterations;
      config.gradient_tolerance = options.solver.gradient_tolerance;
      config.step_tolerance = options.solver.step_tolerance;
      config.cost_tolerance = options.solver.cost_tolerance;
      config.difference_step = options.solver.difference_step;
      config.magnitude_only = options.solver.magnitude_only;
      config.weights = options.solver.weights;
      config.auto_restart = options.solver.auto_restart;

      row.fit = fit(point.trace, start, config);
      fill_row(row, system);
      row.ok = row.fit.converged;
      if (!row.ok) row.error = row.fit.message;
      if (row.ok) {
        previous = row.fit.model;
        previous_n = n;
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace optomech
