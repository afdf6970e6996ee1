#include "optomech/commands.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "optomech/errors.hpp"
#include "optomech/noise.hpp"
#include "optomech/spectrum.hpp"
#include "optomech/trace_io.hpp"
#include "optomech/units.hpp"

namespace optomech {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string hz(double rad) { return format_double(rad_to_hz(rad)); }
std::string num(double x) { return format_double(x); }
std::string flag(bool b) { return b ? "true" : "false"; }

// "key: value" summary lines
class Record {
 public:
  Record& add(std::string_view key, const std::string& value) {
    text_ += std::string(key) + ": " + value + "\n";
    return *this;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

RunConfig load(const CommandOptions& o) {
  RunConfig cfg = load_config(o.config);
  if (o.modes) {
    if (*o.modes < 1 || *o.modes > cfg.system.mode_count()) {
      throw InvariantError("--modes must be between 1 and " + std::to_string(cfg.system.mode_count()));
    }
    cfg.system = cfg.system.with_mode_count(*o.modes);
  }
  if (o.track_detuning) cfg.drive.track_detuning = true;
  if (o.seed) cfg.noise.seed = *o.seed;
  if (o.grid) {
    const GridReference ref = cfg.grid.main ? cfg.grid.main->reference : GridReference::cavity;
    cfg.grid.main = parse_grid_flag(*o.grid, ref);
  }
  return cfg;
}

void emit(const CommandOptions& o, const std::string& payload, std::ostream& out) {
  if (o.out) {
    write_file_atomic(*o.out, payload);
  } else {
    out << payload;
  }
}

std::ostream& summary_stream(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return o.out ? out : err;
}

double photon_numbers_at(double coupling, double g0) { return coupling * coupling / (g0 * g0); }

TraceFile require_lab_transmission(const CommandOptions& o) {
  if (!o.trace) throw ParseError(o.command + " needs a trace file argument");
  TraceFile tf = read_trace(*o.trace);
  if (tf.trace.quantity() != Quantity::transmission) {
    throw InvariantError(o.command + " needs a transmission trace, got " +
                         std::string(quantity_name(tf.trace.quantity())));
  }
  if (tf.metadata.frame != "lab") throw InvariantError(o.command + " needs lab-frame frequencies");
  return tf;
}

// Drive of a measured trace: header metadata first, config otherwise.
DriveState trace_drive(const RunConfig& cfg, const OptomechSystem& sys, const TraceMetadata& meta,
                       double* photon_number) {
  const double n = meta.photon_number.value_or(cfg.drive.photon_number);
  *photon_number = n;
  if (meta.drive_frequency) return DriveState(sys, n, *meta.drive_frequency);
  return make_drive(cfg.drive, sys, n);
}

ordered_json model_json(const ModelParameters& p) {
  ordered_json j;
  j["cavity_frequency_hz"] = rad_to_hz(p.cavity_frequency);
  j["kappa_port1_hz"] = rad_to_hz(p.kappa_port1);
  j["kappa_port2_hz"] = rad_to_hz(p.kappa_port2);
  j["kappa_internal_hz"] = rad_to_hz(p.kappa_internal);
  j["coupling_hz"] = rad_to_hz(p.coupling);
  j["drive_frequency_hz"] = rad_to_hz(p.drive_frequency);
  if (p.photon_number) {
    j["photon_number"] = *p.photon_number;
  } else {
    j["photon_number"] = nullptr;
  }
  j["g0_hz"] = rad_to_hz(p.g0);
  j["shift_per_photon_hz"] = rad_to_hz(p.shift_per_photon);
  j["reference_photon_number"] = p.reference_photon_number;
  ordered_json modes = ordered_json::array();
  for (const MechTerm& m : p.modes) {
    modes.push_back({{"frequency_hz", rad_to_hz(m.frequency)},
                     {"linewidth_hz", rad_to_hz(m.linewidth)},
                     {"weight", m.weight}});
  }
  j["modes"] = modes;
  j["background"] = {
      {"offset", {p.background_offset.real(), p.background_offset.imag()}},
      {"slope_per_hz", {p.background_slope.real() * kTwoPi, p.background_slope.imag() * kTwoPi}},
      {"reference_hz", rad_to_hz(p.background_reference)}};
  return j;
}

ordered_json derived_json(const FitResult& r, const OptomechSystem& like) {
  const FitSummary s = summarize_fit(r, like);
  ordered_json j;
  j["coupling_hz"] = rad_to_hz(s.coupling);
  j["coupling_sigma_hz"] = rad_to_hz(s.coupling_sigma);
  j["kappa_hz"] = rad_to_hz(s.kappa);
  j["detuning_hz"] = rad_to_hz(r.model.detuning());
  j["omega_plus_hz"] = rad_to_hz(s.frequencies.plus);
  j["omega_minus_hz"] = rad_to_hz(s.frequencies.minus);
  j["splitting_hz"] = rad_to_hz(s.frequencies.splitting());
  j["cooperativity"] = s.cooperativity.classical;
  j["quantum_cooperativity"] = s.cooperativity.quantum;
  j["regime"] = regime_label(s.report);
  return j;
}

ComplexTrace subtract_background(const ComplexTrace& t, const ModelParameters& p) {
  if (p.background_offset == cplx{} && p.background_slope == cplx{}) return t;
  std::vector<cplx> v(t.values().begin(), t.values().end());
  const auto f = t.frequencies();
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] -= p.background_offset + p.background_slope * (f[k] - p.background_reference);
  }
  return ComplexTrace(t.quantity(), std::vector<double>(f.begin(), f.end()), std::move(v));
}

FitConfig fit_config_for(const RunConfig& cfg, const ModelParameters& start) {
  FitConfig fc = cfg.fit.solver;
  if (!cfg.fit.parameters.empty()) {
    fc.parameters = cfg.fit.parameters;
    return fc;
  }
  fc.parameters.clear();
  for (const ParameterSpec& spec : default_fit_config(start, cfg.fit.defaults).parameters) {
    bool fixed = false;
    for (const ParameterId& id : cfg.fit.fixed) fixed = fixed || id == spec.id;
    if (!fixed) fc.parameters.push_back(spec);
  }
  if (fc.parameters.empty()) throw InvariantError("fit: every parameter is fixed");
  return fc;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load(o);
  const OptomechSystem& sys = cfg.system;
  const DriveState drive = make_drive(cfg.drive, sys);
  const std::vector<double> grid = build_grid(cfg.grid, sys, drive);
  const RegimeReport report = classify_regime(sys, drive);

  TraceMetadata meta;
  meta.drive_frequency = drive.drive_frequency();
  meta.photon_number = drive.photon_number();
  std::optional<ComplexTrace> clean;
  switch (cfg.simulate.quantity) {
    case Quantity::transmission:
      clean = trace(sys, drive, grid);
      break;
    case Quantity::cavity_susceptibility: {
      std::vector<cplx> v;
      v.reserve(grid.size());
      for (double w : grid) v.push_back(chi_cavity_effective(w, sys, drive));
      clean = ComplexTrace(Quantity::cavity_susceptibility, grid, std::move(v));
      break;
    }
    case Quantity::mech_susceptibility_normalized: {
      std::vector<double> nu(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) nu[k] = grid[k] - drive.drive_frequency();
      clean = chi_m_trace(sys, drive, nu);
      meta.frame = "drive";
      break;
    }
  }
  const double peak = peak_magnitude(*clean);
  const double sigma = cfg.noise.relative ? cfg.noise.sigma * peak : cfg.noise.sigma;
  TraceFile file{*clean, meta};
  if (sigma > 0.0) {
    file.trace = add_noise(*clean, {sigma, cfg.noise.seed});
    file.metadata.seed = cfg.noise.seed;
    file.metadata.noise_sigma = sigma;
  }
  if (report.regime == Regime::unstable) {
    err << "warning: drive is beyond the instability threshold; the steady-state response "
           "shown is not physical\n";
  }
  emit(o, format_trace(file), out);

  Record r;
  r.add("command", "simulate")
      .add("quantity", std::string(quantity_name(file.trace.quantity())))
      .add("points", std::to_string(grid.size()))
      .add("photon_number", num(drive.photon_number()))
      .add("drive_frequency_hz", hz(drive.drive_frequency()))
      .add("cavity_frequency_hz", hz(drive.cavity_frequency()))
      .add("detuning_hz", hz(drive.detuning()))
      .add("coupling_hz", hz(drive.coupling()))
      .add("kappa_hz", hz(sys.cavity().kappa()))
      .add("cooperativity", num(report.cooperativity))
      .add("quantum_cooperativity", num(report.quantum_cooperativity))
      .add("regime", regime_label(report))
      .add("stable", flag(report.regime != Regime::unstable))
      .add("peak_magnitude", num(peak));
  if (sigma > 0.0) r.add("noise_sigma", num(sigma)).add("seed", std::to_string(cfg.noise.seed));
  if (o.out) r.add("output", o.out->string());
  summary_stream(o, out, err) << r.str();
  return 0;
}

int cmd_eigen(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load(o);
  const OptomechSystem& sys = cfg.system;
  const DriveState drive = make_drive(cfg.drive, sys);
  const EigenInputs base = eigen_inputs(sys, drive);
  // swept in Hz so the g column prints as configured
  std::vector<double> couplings_hz{rad_to_hz(base.coupling)};
  if (cfg.eigen.coupling_sweep) {
    const GridSegment& s = *cfg.eigen.coupling_sweep;
    couplings_hz = linear_grid(rad_to_hz(s.start), rad_to_hz(s.stop), s.points);
  }
  std::string table = "g_hz,omega_plus_hz,omega_minus_hz,splitting_hz,splitting_approx_hz,stable\n";
  std::size_t unstable = 0;
  for (double g_hz : couplings_hz) {
    EigenInputs in = base;
    in.coupling = hz_to_rad(g_hz);
    const EigenSolution sol = eigenvalues_numeric(in);
    unstable += sol.stable() ? 0 : 1;
    table += format_double(g_hz) + ',' + hz(sol.omega_plus) + ',' + hz(sol.omega_minus) + ',' +
             hz(sol.splitting) + ',' + hz(splitting_approx(in.coupling, in.kappa)) + ',' +
             flag(sol.stable()) + '\n';
  }
  emit(o, table, out);

  Record r;
  r.add("command", "eigen")
      .add("rows", std::to_string(couplings_hz.size()))
      .add("detuning_hz", hz(base.detuning))
      .add("kappa_hz", hz(base.kappa))
      .add("critical_coupling_hz", hz(instability_threshold(base.detuning, base.kappa,
                                                            base.mech_frequency)))
      .add("unstable_rows", std::to_string(unstable));
  if (o.out) r.add("output", o.out->string());
  summary_stream(o, out, err) << r.str();
  return 0;
}

int cmd_regime(const CommandOptions& o, std::ostream& out, std::ostream&) {
  const RunConfig cfg = load(o);
  const OptomechSystem& sys = cfg.system;
  const DriveState drive = make_drive(cfg.drive, sys);
  const RegimeReport rep = classify_regime(sys, drive);
  const MechMode& m = sys.fundamental();
  const double kappa = sys.cavity().kappa();

  Record r;
  r.add("regime", regime_label(rep))
      .add("photon_number", num(drive.photon_number()))
      .add("coupling_hz", hz(drive.coupling()))
      .add("detuning_hz", hz(drive.detuning()))
      .add("kappa_hz", hz(kappa))
      .add("mech_frequency_hz", hz(m.frequency()))
      .add("cooperativity", num(rep.cooperativity))
      .add("quantum_cooperativity", num(rep.quantum_cooperativity))
      .add("strong_ratio", num(rep.strong_ratio))
      .add("splitting_ratio", num(rep.splitting_ratio))
      .add("critical_coupling_hz", hz(rep.critical_coupling))
      .add("critical_ratio", num(rep.critical_ratio))
      .add("at_red_sideband", flag(rep.at_red_sideband))
      .add("resolved_sideband", flag(sys.resolved_sideband()));
  if (m.g0() > 0.0) {
    const double n_c = kappa * m.linewidth() / (4.0 * m.g0() * m.g0());
    r.add("photon_number_c1", num(n_c))
        .add("photon_number_cq1", num(n_c * sys.thermal_occupancy()))
        .add("photon_number_strong", num(photon_numbers_at(0.25 * kappa, m.g0())))
        .add("photon_number_ultrastrong",
             num(photon_numbers_at(ultrastrong_onset_coupling(kappa, m.frequency()), m.g0())))
        .add("photon_number_critical", num(critical_photon_number(sys)));
  }
  out << r.str();

  const RegimeSpec& spec = cfg.regime;
  std::string table;
  if (spec.table == RegimeSpec::Table::boundaries) {
    table = "kappa_over_omega,strong_g_over_omega,ultrastrong_g_over_omega,stability_g_over_omega\n";
    for (const BoundaryRow& b : regime_boundaries(spec.kappa_over_omega_min,
                                                  spec.kappa_over_omega_max, spec.boundary_points)) {
      table += num(b.kappa_over_omega) + ',' + num(b.strong) + ',' + num(b.ultrastrong) + ',' +
               num(b.stability) + '\n';
    }
  } else if (spec.table == RegimeSpec::Table::trajectory) {
    table =
        "photon_number,coupling_hz,regime,cooperativity,quantum_cooperativity,strong_ratio,"
        "splitting_ratio,critical_ratio,event\n";
    for (const TrajectoryRow& t :
         device_trajectory(sys, spec.photon_min, spec.photon_max, spec.trajectory_points)) {
      table += num(t.photon_number) + ',' + hz(t.coupling) + ',' +
               std::string(regime_name(t.report.regime)) + ',' + num(t.report.cooperativity) + ',' +
               num(t.report.quantum_cooperativity) + ',' + num(t.report.strong_ratio) + ',' +
               num(t.report.splitting_ratio) + ',' + num(t.report.critical_ratio) + ',' +
               std::string(t.event) + '\n';
    }
  }
  if (!table.empty()) {
    if (o.out) {
      write_file_atomic(*o.out, table);
    } else {
      out << '\n' << table;
    }
  }
  return 0;
}

int cmd_fit(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load(o);
  const OptomechSystem& sys = cfg.system;
  const TraceFile tf = require_lab_transmission(o);
  double n = 0.0;
  const DriveState drive = trace_drive(cfg, sys, tf.metadata, &n);
  const ModelParameters start = cfg.fit.start_from ? parse_fit_model(read_file(*cfg.fit.start_from))
                                                   : model_parameters(sys, drive);
  const FitConfig fc = fit_config_for(cfg, start);
  const FitResult result = fit(tf.trace, start, fc);
  emit(o, fit_result_json(result, sys), out);

  Record r;
  r.add("command", "fit")
      .add("status", std::string(fit_status_name(result.status)))
      .add("iterations", std::to_string(result.iterations))
      .add("cost", num(result.cost))
      .add("parameters", std::to_string(result.parameters.size()));
  for (const FittedParameter& p : result.parameters) {
    const double s = p.id.file_scale();
    r.add(p.id.name(), num(p.value * s) + " +- " + num(p.sigma * s));
  }
  if (o.out) r.add("output", o.out->string());
  summary_stream(o, out, err) << r.str();
  if (!result.converged) {
    err << "error: fit did not converge (" << fit_status_name(result.status) << "): "
        << result.message << '\n';
    return static_cast<int>(ExitCode::solver);
  }
  return 0;
}

int cmd_reconstruct(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load(o);
  const TraceFile tf = require_lab_transmission(o);
  double n = 0.0;
  OptomechSystem sys = cfg.system;
  DriveState drive = trace_drive(cfg, sys, tf.metadata, &n);
  ComplexTrace data = tf.trace;
  if (cfg.fit.start_from) {
    const ModelParameters p = parse_fit_model(read_file(*cfg.fit.start_from));
    sys = to_system(p, cfg.system, n);
    drive = to_drive(p, sys, n);
    data = subtract_background(data, p);
  }
  if (!(drive.coupling() > 0.0)) {
    throw InvariantError("reconstruct needs g > 0; set drive.photon_number above zero");
  }
  const ComplexTrace chi = reconstruct_chi_m(data, sys, drive);
  TraceMetadata meta;
  meta.frame = "drive";
  meta.drive_frequency = drive.drive_frequency();
  meta.photon_number = drive.photon_number();
  emit(o, format_trace({chi, meta}), out);

  Record r;
  r.add("command", "reconstruct")
      .add("points", std::to_string(chi.size()))
      .add("coupling_hz", hz(drive.coupling()))
      .add("quality_factor", num(sys.fundamental().quality_factor()))
      .add("peak_magnitude", num(peak_magnitude(chi)));
  if (o.out) r.add("output", o.out->string());
  summary_stream(o, out, err) << r.str();
  return 0;
}

int cmd_sweep(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load(o);
  const OptomechSystem& sys = cfg.system;
  const SweepSpec& spec = cfg.sweep;
  std::vector<SweepPoint> points;
  if (!spec.traces.empty()) {
    for (const SweepTrace& t : spec.traces) {
      TraceFile tf = read_trace(t.path);
      if (tf.trace.quantity() != Quantity::transmission || tf.metadata.frame != "lab") {
        throw InvariantError(t.path.string() + ": sweep needs lab-frame transmission traces");
      }
      const double wd = tf.metadata.drive_frequency
                            ? *tf.metadata.drive_frequency
                            : make_drive(cfg.drive, sys, t.photon_number).drive_frequency();
      points.push_back({t.photon_number, wd, std::move(tf.trace)});
    }
  } else {
    if (spec.photon_numbers.empty()) throw ParseError("sweep needs sweep.photon_numbers or sweep.traces");
    for (std::size_t i = 0; i < spec.photon_numbers.size(); ++i) {
      const double n = spec.photon_numbers[i];
      const DriveState drive = make_drive(cfg.drive, sys, n);
      const std::vector<double> grid = build_grid(cfg.grid, sys, drive);
      const ComplexTrace clean = trace(sys, drive, grid);
      const double sigma = cfg.noise.relative ? cfg.noise.sigma * peak_magnitude(clean) : cfg.noise.sigma;
      // independent noise stream per power point
      ComplexTrace t = sigma > 0.0 ? add_noise(clean, {sigma, counter_hash(cfg.noise.seed, i)}) : clean;
      points.push_back({n, drive.drive_frequency(), std::move(t)});
    }
  }
  SweepOptions options;
  options.fit_options = cfg.fit.defaults;
  options.kappa_bound_factor = spec.kappa_bound_factor;
  options.warm_start = spec.warm_start;
  options.solver = cfg.fit.solver;
  const std::vector<SweepRow> rows = power_sweep_extract(points, sys, options);

  std::string table =
      "photon_number,ok,status,iterations,cost,coupling_hz,coupling_sigma_hz,kappa_hz,"
      "kappa_lower_hz,kappa_upper_hz,omega_plus_hz,omega_minus_hz,splitting_hz,cooperativity,"
      "quantum_cooperativity,regime,error\n";
  std::size_t failed = 0;
  for (const SweepRow& row : rows) {
    failed += row.ok ? 0 : 1;
    const bool fitted = !row.fit.parameters.empty();
    table += num(row.photon_number) + ',' + flag(row.ok) + ',' +
             (fitted ? std::string(fit_status_name(row.fit.status)) : std::string("error")) + ',' +
             std::to_string(row.fit.iterations) + ',' + num(row.fit.cost) + ',' + hz(row.coupling) +
             ',' + hz(row.coupling_sigma) + ',' + hz(row.kappa) + ',' + hz(row.kappa_lower) + ',' +
             hz(row.kappa_upper) + ',' + hz(row.frequencies.plus) + ',' + hz(row.frequencies.minus) +
             ',' + hz(row.frequencies.splitting()) + ',' + num(row.cooperativity.classical) + ',' +
             num(row.cooperativity.quantum) + ',' +
             (fitted ? std::string(regime_name(row.regime)) : std::string()) + ',' +
             csv_field(row.error) + '\n';
  }
  emit(o, table, out);

  Record r;
  r.add("command", "sweep")
      .add("points", std::to_string(rows.size()))
      .add("failed", std::to_string(failed));
  if (o.out) r.add("output", o.out->string());
  summary_stream(o, out, err) << r.str();
  if (failed > 0) {
    err << "error: " << failed << " sweep point(s) failed to fit\n";
    return static_cast<int>(ExitCode::solver);
  }
  return 0;
}

}  // namespace

std::string regime_label(const RegimeReport& report) {
  std::string label(regime_name(report.regime));
  if (report.near_boundary) label += " (" + std::string(regime_name(*report.near_boundary)) + " boundary)";
  return label;
}

std::string fit_result_json(const FitResult& result, const OptomechSystem& like) {
  ordered_json j;
  ordered_json params = ordered_json::object();
  ordered_json sigmas = ordered_json::object();
  for (const FittedParameter& p : result.parameters) {
    const double s = p.id.file_scale();
    params[p.id.name()] = p.value * s;
    if (std::isfinite(p.sigma)) {
      sigmas[p.id.name()] = p.sigma * s;
    } else {
      sigmas[p.id.name()] = nullptr;
    }
  }
  j["parameters"] = params;
  j["sigmas"] = sigmas;
  j["cost"] = result.cost;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["status"] = std::string(fit_status_name(result.status));
  j["message"] = result.message;
  j["gradient"] = result.gradient;
  j["degrees_of_freedom"] = result.degrees_of_freedom;
  j["cost_history"] = result.cost_history;
  j["model"] = model_json(result.model);
  try {
    j["derived"] = derived_json(result, like);
  } catch (const std::exception&) {
    j["derived"] = nullptr;
  }
  return j.dump(2) + "\n";
}

ModelParameters parse_fit_model(std::string_view text) {
  try {
    const nlohmann::json root = nlohmann::json::parse(text.begin(), text.end());
    const nlohmann::json& m = root.at("model");
    ModelParameters p;
    p.cavity_frequency = hz_to_rad(m.at("cavity_frequency_hz").get<double>());
    p.kappa_port1 = hz_to_rad(m.at("kappa_port1_hz").get<double>());
    p.kappa_port2 = hz_to_rad(m.at("kappa_port2_hz").get<double>());
    p.kappa_internal = hz_to_rad(m.at("kappa_internal_hz").get<double>());
    p.coupling = hz_to_rad(m.at("coupling_hz").get<double>());
    p.drive_frequency = hz_to_rad(m.at("drive_frequency_hz").get<double>());
    if (!m.at("photon_number").is_null()) p.photon_number = m.at("photon_number").get<double>();
    p.g0 = hz_to_rad(m.at("g0_hz").get<double>());
    p.shift_per_photon = hz_to_rad(m.at("shift_per_photon_hz").get<double>());
    p.reference_photon_number = m.at("reference_photon_number").get<double>();
    for (const auto& mode : m.at("modes")) {
      p.modes.push_back({hz_to_rad(mode.at("frequency_hz").get<double>()),
                         hz_to_rad(mode.at("linewidth_hz").get<double>()),
                         mode.at("weight").get<double>()});
    }
    const auto& bg = m.at("background");
    p.background_offset = {bg.at("offset").at(0).get<double>(), bg.at("offset").at(1).get<double>()};
    p.background_slope = {bg.at("slope_per_hz").at(0).get<double>() / kTwoPi,
                          bg.at("slope_per_hz").at(1).get<double>() / kTwoPi};
    p.background_reference = hz_to_rad(bg.at("reference_hz").get<double>());
    validate(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("fit result record: ") + e.what());
  }
}

ExitCode exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return ExitCode::parse;
  if (dynamic_cast<const InvariantError*>(&e)) return ExitCode::invariant;
  if (dynamic_cast<const SolverError*>(&e)) return ExitCode::solver;
  return ExitCode::failure;
}

int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const std::string& c = options.command;
    if (c == "simulate") return cmd_simulate(options, out, err);
    if (c == "eigen") return cmd_eigen(options, out, err);
    if (c == "regime") return cmd_regime(options, out, err);
    if (c == "fit") return cmd_fit(options, out, err);
    if (c == "reconstruct") return cmd_reconstruct(options, out, err);
    if (c == "sweep") return cmd_sweep(options, out, err);
    throw ParseError("unknown command '" + c + "'");
  } catch (const std::exception& e) {
    const ExitCode code = exit_code_for(e);
    const char* kind = code == ExitCode::parse       ? "parse error"
                       : code == ExitCode::invariant ? "invalid input"
                       : code == ExitCode::solver    ? "solver failure"
                                                     : "error";
    err << kind << ": " << e.what() << '\n';
    return static_cast<int>(code);
  }
}

}  // namespace optomech
