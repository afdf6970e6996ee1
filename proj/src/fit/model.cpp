#include <charconv>
#include <cmath>
#include <string>

#include "optomech/errors.hpp"
#include "optomech/fit.hpp"
#include "optomech/units.hpp"

namespace optomech {

namespace {

bool finite(double x) { return std::isfinite(x); }
bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

double ModelParameters::effective_coupling() const {
  return photon_number ? parametric_coupling(g0, *photon_number) : coupling;
}

double ModelParameters::effective_cavity_frequency() const {
  if (!photon_number) return cavity_frequency;
  return cavity_frequency + shift_per_photon * (*photon_number - reference_photon_number);
}

ModelParameters model_parameters(const OptomechSystem& system, const DriveState& drive) {
  const Cavity& c = system.cavity();
  ModelParameters p;
  p.cavity_frequency = drive.cavity_frequency();
  p.kappa_port1 = c.kappa_port1();
  p.kappa_port2 = c.kappa_port2();
  p.kappa_internal = c.kappa_internal();
  const kernels::ResponseModel model = response_model(system, drive);
  for (const kernels::ModeTerm& m : model.modes) p.modes.push_back({m.frequency, m.linewidth, m.weight});
  p.coupling = drive.coupling();
  p.drive_frequency = drive.drive_frequency();
  p.g0 = system.fundamental().g0();
  p.shift_per_photon = system.shift_per_photon();
  p.reference_photon_number = drive.photon_number();
  p.background_reference = p.cavity_frequency;
  return p;
}

void validate(const ModelParameters& p) {
  if (!finite(p.cavity_frequency) || !finite(p.drive_frequency)) {
    throw InvariantError("cavity and drive frequencies must be finite");
  }
  for (double k : {p.kappa_port1, p.kappa_port2, p.kappa_internal}) {
    if (!(k >= 0.0) || !finite(k)) throw InvariantError("cavity decay rates must be finite and >= 0");
  }
  if (!(p.kappa() > 0.0)) throw InvariantError("total cavity linewidth must be positive");
  if (p.modes.empty()) throw InvariantError("at least one mechanical mode is required");
  for (std::size_t i = 0; i < p.modes.size(); ++i) {
    const MechTerm& m = p.modes[i];
    if (!(m.linewidth > 0.0) || !(m.linewidth < m.frequency) || !finite(m.frequency)) {
      throw InvariantError("mode " + std::to_string(i + 1) + " needs 0 < linewidth < frequency");
    }
    if (!(m.weight >= 0.0) || !finite(m.weight)) {
      throw InvariantError("mode " + std::to_string(i + 1) + " weight must be finite and >= 0");
    }
  }
  if (p.modes.front().weight != 1.0) throw InvariantError("fundamental mode weight must be 1");
  if (!(p.coupling >= 0.0) || !finite(p.coupling)) {
    throw InvariantError("coupling must be finite and >= 0");
  }
  if (p.photon_number) {
    if (!(*p.photon_number >= 0.0) || !finite(*p.photon_number)) {
      throw InvariantError("photon number must be finite and >= 0");
    }
    if (!(p.g0 >= 0.0) || !finite(p.g0)) throw InvariantError("g0 must be finite and >= 0");
    if (!finite(p.shift_per_photon) || !finite(p.reference_photon_number)) {
      throw InvariantError("per-photon shift and reference photon number must be finite");
    }
  }
  if (!finite(p.background_offset) || !finite(p.background_slope) ||
      !finite(p.background_reference)) {
    throw InvariantError("background terms must be finite");
  }
}

kernels::ResponseModel response_model(const ModelParameters& p) {
  kernels::ResponseModel model;
  model.detuning = p.detuning();
  model.half_kappa = 0.5 * p.kappa();
  model.port_amplitude = std::sqrt(p.kappa_port1 * p.kappa_port2);
  const double g = p.effective_coupling();
  model.coupling_sq = g * g;
  model.modes.reserve(p.modes.size());
  for (const MechTerm& m : p.modes) model.modes.push_back({m.frequency, m.linewidth, m.weight});
  return model;
}

std::vector<cplx> evaluate(const ModelParameters& p, std::span<const double> grid,
                           kernels::Isa isa) {
  validate(p);
  std::vector<double> nu(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) nu[i] = grid[i] - p.drive_frequency;
  std::vector<cplx> out(grid.size());
  kernels::transmission(response_model(p), nu, out, isa);
  if (p.background_offset != cplx(0.0) || p.background_slope != cplx(0.0)) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out[i] += p.background_offset + p.background_slope * (grid[i] - p.background_reference);
    }
  }
  return out;
}

OptomechSystem to_system(const ModelParameters& p, const OptomechSystem& like,
                         double photon_number) {
  validate(p);
  const double n = p.photon_number ? *p.photon_number : photon_number;
  if (!(n >= 0.0)) throw InvariantError("photon number must be >= 0");
  double g0 = p.photon_number ? p.g0 : 0.0;
  if (!p.photon_number && n > 0.0) g0 = p.coupling / std::sqrt(n);
  const bool from_like = !p.photon_number && n == 0.0;

  std::vector<MechMode> modes;
  for (std::size_t i = 0; i < p.modes.size(); ++i) {
    double g0_i;
    if (from_like) {
      g0_i = i < like.mode_count() ? like.modes()[i].g0() : 0.0;
    } else {
      g0_i = g0 * std::sqrt(p.modes[i].weight);
    }
    modes.emplace_back(p.modes[i].frequency, p.modes[i].linewidth, g0_i);
  }
  const double bare = p.effective_cavity_frequency() - like.shift_per_photon() * n;
  return OptomechSystem(Cavity(bare, p.kappa_port1, p.kappa_port2, p.kappa_internal),
                        std::move(modes), like.thermal_occupancy(), like.kerr_per_photon(),
                        like.kinetic_shift_per_photon());
}

DriveState to_drive(const ModelParameters& p, const OptomechSystem& fitted, double photon_number) {
  const double n = p.photon_number ? *p.photon_number : photon_number;
  return DriveState(fitted, n, p.drive_frequency);
}

std::string ParameterId::name() const {
  const std::string prefix = "mode" + std::to_string(mode + 1) + ".";
  switch (kind) {
    case ParamKind::cavity_frequency: return "cavity_frequency";
    case ParamKind::kappa_port1: return "kappa_port1";
    case ParamKind::kappa_port2: return "kappa_port2";
    case ParamKind::kappa_internal: return "kappa_internal";
    case ParamKind::mech_frequency: return prefix + "frequency";
    case ParamKind::mech_linewidth: return prefix + "linewidth";
    case ParamKind::mode_weight: return prefix + "weight";
    case ParamKind::coupling: return "coupling";
    case ParamKind::photon_number: return "photon_number";
    case ParamKind::background_offset_re: return "background_offset.re";
    case ParamKind::background_offset_im: return "background_offset.im";
    case ParamKind::background_slope_re: return "background_slope.re";
    case ParamKind::background_slope_im: return "background_slope.im";
  }
  return "unknown";
}

std::optional<ParameterId> ParameterId::parse(std::string_view name) {
  static constexpr std::pair<std::string_view, ParamKind> plain[] = {
      {"cavity_frequency", ParamKind::cavity_frequency},
      {"kappa_port1", ParamKind::kappa_port1},
      {"kappa_port2", ParamKind::kappa_port2},
      {"kappa_internal", ParamKind::kappa_internal},
      {"coupling", ParamKind::coupling},
      {"photon_number", ParamKind::photon_number},
      {"background_offset.re", ParamKind::background_offset_re},
      {"background_offset.im", ParamKind::background_offset_im},
      {"background_slope.re", ParamKind::background_slope_re},
      {"background_slope.im", ParamKind::background_slope_im},
  };
  for (const auto& [n, k] : plain) {
    if (name == n) return ParameterId{k, 0};
  }
  if (!name.starts_with("mode")) return std::nullopt;
  const std::size_t dot = name.find('.');
  if (dot == std::string_view::npos || dot == 4) return std::nullopt;
  std::size_t index = 0;
  const char* first = name.data() + 4;
  const char* last = name.data() + dot;
  const auto [ptr, ec] = std::from_chars(first, last, index);
  if (ec != std::errc() || ptr != last || index == 0) return std::nullopt;
  const std::string_view field = name.substr(dot + 1);
  if (field == "frequency") return ParameterId{ParamKind::mech_frequency, index - 1};
  if (field == "linewidth") return ParameterId{ParamKind::mech_linewidth, index - 1};
  if (field == "weight" && index > 1) return ParameterId{ParamKind::mode_weight, index - 1};
  return std::nullopt;
}

bool ParameterId::log_scale() const {
  switch (kind) {
    case ParamKind::kappa_port1:
    case ParamKind::kappa_port2:
    case ParamKind::kappa_internal:
    case ParamKind::mech_linewidth:
    case ParamKind::coupling:
    case ParamKind::photon_number:
      return true;
    default:
      return false;
  }
}

double ParameterId::file_scale() const {
  switch (kind) {
    case ParamKind::cavity_frequency:
    case ParamKind::kappa_port1:
    case ParamKind::kappa_port2:
    case ParamKind::kappa_internal:
    case ParamKind::mech_frequency:
    case ParamKind::mech_linewidth:
    case ParamKind::coupling:
      return 1.0 / kTwoPi;
    case ParamKind::background_slope_re:
    case ParamKind::background_slope_im:
      return kTwoPi;
    default:
      return 1.0;
  }
}

namespace {

double* slot(ModelParameters& p, const ParameterId& id) {
  auto mode = [&]() -> MechTerm& {
    if (id.mode >= p.modes.size()) {
      throw InvariantError("parameter " + id.name() + " refers to a mode the model does not have");
    }
    return p.modes[id.mode];
  };
  auto parts = [](cplx& z) { return reinterpret_cast<double*>(&z); };
  switch (id.kind) {
    case ParamKind::cavity_frequency: return &p.cavity_frequency;
    case ParamKind::kappa_port1: return &p.kappa_port1;
    case ParamKind::kappa_port2: return &p.kappa_port2;
    case ParamKind::kappa_internal: return &p.kappa_internal;
    case ParamKind::mech_frequency: return &mode().frequency;
    case ParamKind::mech_linewidth: return &mode().linewidth;
    case ParamKind::mode_weight:
      if (id.mode == 0) throw InvariantError("the fundamental mode weight is fixed at 1");
      return &mode().weight;
    case ParamKind::coupling: return &p.coupling;
    case ParamKind::photon_number:
      if (!p.photon_number) throw InvariantError("model is not parameterized by photon number");
      return &*p.photon_number;
    case ParamKind::background_offset_re: return parts(p.background_offset);
    case ParamKind::background_offset_im: return parts(p.background_offset) + 1;
    case ParamKind::background_slope_re: return parts(p.background_slope);
    case ParamKind::background_slope_im: return parts(p.background_slope) + 1;
  }
  throw InvariantError("unknown parameter");
}

}  // namespace

double get_parameter(const ModelParameters& p, const ParameterId& id) {
  return *slot(const_cast<ModelParameters&>(p), id);
}

void set_parameter(ModelParameters& p, const ParameterId& id, double value) {
  *slot(p, id) = value;
}

FitConfig default_fit_config(const ModelParameters& p, const DefaultFitOptions& options) {
  validate(p);
  FitConfig config;
  auto rate = [&](ParameterId id) {
    const double v = get_parameter(p, id);
    if (v > 0.0) config.parameters.push_back({id, v / options.rate_factor, v * options.rate_factor, {}});
  };
  auto window = [&](ParameterId id, double half_width) {
    const double v = get_parameter(p, id);
    config.parameters.push_back({id, v - half_width, v + half_width, {}});
  };
  const double kappa = p.kappa();
  window({ParamKind::cavity_frequency, 0}, options.cavity_window * kappa);
  rate({ParamKind::kappa_port1, 0});
  if (options.fit_port2) rate({ParamKind::kappa_port2, 0});
  rate({ParamKind::kappa_internal, 0});
  window({ParamKind::mech_frequency, 0}, options.frequency_window * p.modes[0].frequency);
  if (options.fit_mech_linewidth) rate({ParamKind::mech_linewidth, 0});
  if (options.fit_photon_number) {
    if (!p.photon_number) throw InvariantError("fitting n_d needs a photon-number model");
    rate({ParamKind::photon_number, 0});
  } else {
    rate({ParamKind::coupling, 0});
  }
  if (options.fit_higher_mode_weights) {
    for (std::size_t i = 1; i < p.modes.size(); ++i) {
      const double w = p.modes[i].weight;
      config.parameters.push_back(
          {{ParamKind::mode_weight, i}, 0.0, std::max(options.weight_ceiling * w, 0.5), {}});
    }
  }
  if (options.fit_background) {
    const double a = options.background_window;
    for (ParamKind k : {ParamKind::background_offset_re, ParamKind::background_offset_im}) {
      window({k, 0}, a);
    }
    for (ParamKind k : {ParamKind::background_slope_re, ParamKind::background_slope_im}) {
      window({k, 0}, a / kappa);
    }
  }
  return config;
}

void validate(const FitConfig& config, const ModelParameters& start) {
  if (config.parameters.empty()) throw InvariantError("fit config varies no parameters");
  if (config.max_iterations < 0) throw InvariantError("max_iterations must be >= 0");
  for (double t : {config.gradient_tolerance, config.step_tolerance, config.cost_tolerance}) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvariantError("tolerances must be finite and >= 0");
  }
  if (!(config.difference_step > 0.0) || !(config.difference_step < 1e-1)) {
    throw InvariantError("difference_step must lie in (0, 0.1)");
  }
  for (double w : config.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvariantError("weights must be finite and >= 0");
  }
  for (std::size_t i = 0; i < config.parameters.size(); ++i) {
    const ParameterSpec& s = config.parameters[i];
    const std::string name = s.id.name();
    for (std::size_t j = 0; j < i; ++j) {
      if (config.parameters[j].id == s.id) throw InvariantError("parameter " + name + " listed twice");
    }
    if (!std::isfinite(s.lower) || !std::isfinite(s.upper) || !(s.lower < s.upper)) {
      throw InvariantError("parameter " + name + " needs finite bounds with lower < upper");
    }
    if (s.id.log_scale() && !(s.lower > 0.0)) {
      throw InvariantError("parameter " + name + " is fitted in log space; lower bound must be > 0");
    }
    const double v = s.initial ? *s.initial : get_parameter(start, s.id);
    if (!(v >= s.lower && v <= s.upper)) {
      throw InvariantError("initial value of " + name + " lies outside its bounds");
    }
  }
}

std::vector<double> residuals(const ModelParameters& p, const ComplexTrace& trace,
                              const ResidualOptions& options) {
  if (trace.quantity() != Quantity::transmission) {
    throw InvariantError("residuals need a transmission trace");
  }
  if (!options.weights.empty() && options.weights.size() != trace.size()) {
    throw InvariantError("weights must match the trace length");
  }
  const std::vector<cplx> model = evaluate(p, trace.frequencies());
  const std::span<const cplx> data = trace.values();
  const std::size_t n = trace.size();
  std::vector<double> r(options.magnitude_only ? n : 2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = options.weights.empty() ? 1.0 : std::sqrt(options.weights[k]);
    if (options.magnitude_only) {
      r[k] = s * (std::abs(model[k]) - std::abs(data[k]));
    } else {
      r[2 * k] = s * (model[k].real() - data[k].real());
      r[2 * k + 1] = s * (model[k].imag() - data[k].imag());
    }
  }
  return r;
}

double cost(std::span<const double> residual_vector) {
  double sum = 0.0;
  for (double x : residual_vector) sum += x * x;
  return sum;
}

}  // namespace optomech
