#include "optomech/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "json.hpp"

#include "optomech/errors.hpp"
#include "optomech/trace_io.hpp"
#include "optomech/units.hpp"

namespace optomech {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& path, const std::string& what) {
  throw ParseError("config key '" + path + "': " + what);
}

// Object view that remembers which keys were read so leftovers can be
// rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad_key(display(), "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = get(key);
    if (!v) bad_key(sub(key), "is required");
    return *v;
  }

  double number(const std::string& key) { return as_number(require(key), sub(key)); }

  std::optional<double> number_opt(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    return as_number(*v, sub(key));
  }

  double number_or(const std::string& key, double fallback) {
    return number_opt(key).value_or(fallback);
  }

  bool boolean_or(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) bad_key(sub(key), "expected true or false");
    return v->get<bool>();
  }

  std::optional<std::string> string_opt(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) bad_key(sub(key), "expected a string");
    return v->get<std::string>();
  }

  std::size_t count_or(const std::string& key, std::size_t fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    return as_count(*v, sub(key));
  }

  std::optional<std::uint64_t> seed_opt(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      bad_key(sub(key), "expected a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  Section object(const std::string& key) { return Section(require(key), sub(key)); }

  std::optional<Section> object_opt(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    return Section(*v, sub(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) bad_key(sub(it.key()), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) bad_key(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) bad_key(path, "must be finite");
    return x;
  }

  static std::size_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      bad_key(path, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) bad_key(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(Section::as_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

GridReference parse_reference(const std::string& s, const std::string& path) {
  if (s == "absolute") return GridReference::absolute;
  if (s == "cavity") return GridReference::cavity;
  if (s == "drive") return GridReference::drive;
  bad_key(path, "reference must be absolute, cavity or drive");
}

OptomechSystem parse_system(Section& root) {
  Section cav = root.object("cavity");
  const double wc = cav.number("frequency_hz");
  const double k1 = cav.number("kappa_port1_hz");
  const double k2 = cav.number_or("kappa_port2_hz", 0.0);
  const double ki = cav.number("kappa_internal_hz");
  cav.finish();

  const json& modes_json = root.require("modes");
  if (!modes_json.is_array() || modes_json.empty()) bad_key("modes", "expected a non-empty array");
  std::vector<MechMode> modes;
  for (std::size_t i = 0; i < modes_json.size(); ++i) {
    Section m(modes_json[i], "modes[" + std::to_string(i) + "]");
    modes.push_back(MechMode::from_hz(m.number("frequency_hz"), m.number("linewidth_hz"),
                                      m.number("g0_hz")));
    m.finish();
  }

  const double n_th = root.number("thermal_occupancy");
  std::optional<double> kerr;
  if (auto k = root.number_opt("kerr_per_photon_hz")) kerr = hz_to_rad(*k);
  const double kinetic = hz_to_rad(root.number_or("kinetic_shift_per_photon_hz", 0.0));

  OptomechSystem sys(Cavity::from_hz(wc, k1, k2, ki), std::move(modes), n_th, kerr, kinetic);
  if (const json* u = root.get("uncertainties")) {
    if (!u->is_object()) bad_key("uncertainties", "expected an object of numbers");
    std::map<std::string, double> values;
    for (auto it = u->begin(); it != u->end(); ++it) {
      values[it.key()] = Section::as_number(it.value(), "uncertainties." + it.key());
    }
    sys = sys.with_uncertainties(std::move(values));
  }
  return sys;
}

DriveSpec parse_drive(Section& root) {
  DriveSpec d;
  auto s = root.object_opt("drive");
  if (!s) return d;
  d.photon_number = s->number_or("photon_number", 0.0);
  if (d.photon_number < 0.0) bad_key(s->sub("photon_number"), "must be >= 0");
  const auto detuning = s->number_opt("detuning_hz");
  const auto frequency = s->number_opt("frequency_hz");
  if (detuning && frequency) bad_key(s->sub("detuning_hz"), "give detuning_hz or frequency_hz, not both");
  if (detuning) {
    d.mode = DriveSpec::Mode::detuning;
    d.value = hz_to_rad(*detuning);
  } else if (frequency) {
    d.mode = DriveSpec::Mode::frequency;
    d.value = hz_to_rad(*frequency);
  }
  d.track_detuning = s->boolean_or("track_detuning", false);
  s->finish();
  return d;
}

GridSegment parse_segment(Section& s, std::string_view prefix, bool with_reference) {
  const std::string p(prefix);
  GridSegment g;
  g.start = hz_to_rad(s.number(p + "start_hz"));
  g.stop = hz_to_rad(s.number(p + "stop_hz"));
  g.points = s.count_or("points", 0);
  if (g.points < 2) bad_key(s.sub("points"), "need at least 2 points");
  if (!(g.stop > g.start)) bad_key(s.sub(p + "stop_hz"), "must exceed " + p + "start_hz");
  if (with_reference) {
    g.reference = parse_reference(s.string_opt("reference").value_or("cavity"), s.sub("reference"));
  }
  return g;
}

GridSpec parse_grid(Section& root) {
  GridSpec g;
  auto s = root.object_opt("grid");
  if (!s) return g;
  g.main = parse_segment(*s, "", true);
  if (auto m = s->object_opt("mechanical_window")) {
    g.mechanical_points = m->count_or("points", 401);
    if (g.mechanical_points < 2) bad_key(m->sub("points"), "need at least 2 points");
    g.mechanical_half_width = m->number_or("half_width_linewidths", 10.0);
    if (!(g.mechanical_half_width > 0.0)) bad_key(m->sub("half_width_linewidths"), "must be > 0");
    m->finish();
  }
  s->finish();
  return g;
}

NoiseSpec parse_noise(Section& root) {
  NoiseSpec n;
  auto s = root.object_opt("noise");
  if (!s) return n;
  const auto sigma = s->number_opt("sigma");
  const auto relative = s->number_opt("sigma_relative");
  if (sigma && relative) bad_key(s->sub("sigma"), "give sigma or sigma_relative, not both");
  n.sigma = sigma ? *sigma : relative.value_or(0.0);
  n.relative = relative.has_value();
  if (n.sigma < 0.0) bad_key(s->sub(relative ? "sigma_relative" : "sigma"), "must be >= 0");
  n.seed = s->seed_opt("seed").value_or(0);
  s->finish();
  return n;
}

ParameterId parse_parameter_name(const json& v, const std::string& path) {
  if (!v.is_string()) bad_key(path, "expected a parameter name");
  const auto id = ParameterId::parse(v.get<std::string>());
  if (!id) bad_key(path, "unknown parameter '" + v.get<std::string>() + "'");
  return *id;
}

FitSpec parse_fit(Section& root, const std::filesystem::path& dir) {
  FitSpec f;
  auto s = root.object_opt("fit");
  if (!s) return f;
  DefaultFitOptions& o = f.defaults;
  o.fit_photon_number = s->boolean_or("fit_photon_number", o.fit_photon_number);
  o.fit_port2 = s->boolean_or("fit_port2", o.fit_port2);
  o.fit_background = s->boolean_or("fit_background", o.fit_background);
  o.fit_higher_mode_weights = s->boolean_or("fit_higher_mode_weights", o.fit_higher_mode_weights);
  o.fit_mech_linewidth = s->boolean_or("fit_mech_linewidth", o.fit_mech_linewidth);
  o.rate_factor = s->number_or("rate_factor", o.rate_factor);
  o.cavity_window = s->number_or("cavity_window_kappa", o.cavity_window);
  o.frequency_window = s->number_or("frequency_window", o.frequency_window);
  o.weight_ceiling = s->number_or("weight_ceiling", o.weight_ceiling);
  o.background_window = s->number_or("background_window", o.background_window);
  if (!(o.rate_factor > 1.0)) bad_key(s->sub("rate_factor"), "must be > 1");

  FitConfig& c = f.solver;
  if (const json* v = s->get("max_iterations")) {
    const std::size_t n = Section::as_count(*v, s->sub("max_iterations"));
    if (n < 1 || n > 100000) bad_key(s->sub("max_iterations"), "must be in [1, 100000]");
    c.max_iterations = static_cast<int>(n);
  }
  c.gradient_tolerance = s->number_or("gradient_tolerance", c.gradient_tolerance);
  c.step_tolerance = s->number_or("step_tolerance", c.step_tolerance);
  c.cost_tolerance = s->number_or("cost_tolerance", c.cost_tolerance);
  c.difference_step = s->number_or("difference_step", c.difference_step);
  if (!(c.difference_step > 0.0)) bad_key(s->sub("difference_step"), "must be > 0");
  c.magnitude_only = s->boolean_or("magnitude_only", c.magnitude_only);
  c.auto_restart = s->boolean_or("auto_restart", c.auto_restart);

  if (const json* list = s->get("parameters")) {
    if (!list->is_array()) bad_key(s->sub("parameters"), "expected an array");
    for (std::size_t i = 0; i < list->size(); ++i) {
      Section p((*list)[i], s->sub("parameters") + "[" + std::to_string(i) + "]");
      ParameterSpec spec;
      spec.id = parse_parameter_name(p.require("name"), p.sub("name"));
      // file units -> rad/s
      const double scale = spec.id.file_scale();
      spec.lower = p.number("lower") / scale;
      spec.upper = p.number("upper") / scale;
      if (auto init = p.number_opt("initial")) spec.initial = *init / scale;
      p.finish();
      f.parameters.push_back(spec);
    }
  }
  if (const json* list = s->get("fixed")) {
    if (!list->is_array()) bad_key(s->sub("fixed"), "expected an array of parameter names");
    for (std::size_t i = 0; i < list->size(); ++i) {
      f.fixed.push_back(parse_parameter_name((*list)[i], s->sub("fixed") + "[" + std::to_string(i) + "]"));
    }
  }
  if (!f.parameters.empty() && !f.fixed.empty()) {
    bad_key(s->sub("fixed"), "only applies to the default parameter set");
  }
  if (auto p = s->string_opt("start_from")) {
    std::filesystem::path path(*p);
    f.start_from = path.is_absolute() ? path : dir / path;
  }
  s->finish();
  return f;
}

EigenSpec parse_eigen(Section& root) {
  EigenSpec e;
  auto s = root.object_opt("eigen");
  if (!s) return e;
  e.coupling_sweep = parse_segment(*s, "coupling_", false);
  if (e.coupling_sweep->start < 0.0) bad_key(s->sub("coupling_start_hz"), "must be >= 0");
  s->finish();
  return e;
}

RegimeSpec parse_regime(Section& root) {
  RegimeSpec r;
  auto s = root.object_opt("regime");
  if (!s) return r;
  if (auto t = s->string_opt("table")) {
    if (*t == "none") r.table = RegimeSpec::Table::none;
    else if (*t == "boundaries") r.table = RegimeSpec::Table::boundaries;
    else if (*t == "trajectory") r.table = RegimeSpec::Table::trajectory;
    else bad_key(s->sub("table"), "must be none, boundaries or trajectory");
  }
  r.kappa_over_omega_min = s->number_or("kappa_over_omega_min", r.kappa_over_omega_min);
  r.kappa_over_omega_max = s->number_or("kappa_over_omega_max", r.kappa_over_omega_max);
  r.boundary_points = s->count_or("boundary_points", r.boundary_points);
  r.photon_min = s->number_or("photon_min", r.photon_min);
  r.photon_max = s->number_or("photon_max", r.photon_max);
  r.trajectory_points = s->count_or("trajectory_points", r.trajectory_points);
  if (!(r.kappa_over_omega_min > 0.0) || !(r.kappa_over_omega_max > r.kappa_over_omega_min)) {
    bad_key(s->sub("kappa_over_omega_max"), "need 0 < kappa_over_omega_min < kappa_over_omega_max");
  }
  if (!(r.photon_min > 0.0) || !(r.photon_max > r.photon_min)) {
    bad_key(s->sub("photon_max"), "need 0 < photon_min < photon_max");
  }
  if (r.boundary_points < 2) bad_key(s->sub("boundary_points"), "need at least 2 points");
  if (r.trajectory_points < 2) bad_key(s->sub("trajectory_points"), "need at least 2 points");
  s->finish();
  return r;
}

SweepSpec parse_sweep(Section& root, const std::filesystem::path& dir) {
  SweepSpec w;
  auto s = root.object_opt("sweep");
  if (!s) return w;
  if (const json* v = s->get("photon_numbers")) w.photon_numbers = number_list(*v, s->sub("photon_numbers"));
  if (const json* v = s->get("traces")) {
    if (!v->is_array()) bad_key(s->sub("traces"), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      Section t((*v)[i], s->sub("traces") + "[" + std::to_string(i) + "]");
      SweepTrace entry;
      entry.photon_number = t.number("photon_number");
      const auto p = t.string_opt("path");
      if (!p) bad_key(t.sub("path"), "is required");
      std::filesystem::path path(*p);
      entry.path = path.is_absolute() ? path : dir / path;
      t.finish();
      w.traces.push_back(std::move(entry));
    }
  }
  if (!w.photon_numbers.empty() && !w.traces.empty()) {
    bad_key(s->sub("traces"), "give photon_numbers or traces, not both");
  }
  for (double n : w.photon_numbers) {
    if (!(n > 0.0)) bad_key(s->sub("photon_numbers"), "photon numbers must be > 0");
  }
  for (const SweepTrace& t : w.traces) {
    if (!(t.photon_number > 0.0)) bad_key(s->sub("traces"), "photon numbers must be > 0");
  }
  w.kappa_bound_factor = s->number_or("kappa_bound_factor", w.kappa_bound_factor);
  if (!(w.kappa_bound_factor > 1.0)) bad_key(s->sub("kappa_bound_factor"), "must be > 1");
  w.warm_start = s->boolean_or("warm_start", w.warm_start);
  s->finish();
  return w;
}

SimulateSpec parse_simulate(Section& root) {
  SimulateSpec out;
  auto s = root.object_opt("simulate");
  if (!s) return out;
  if (auto q = s->string_opt("quantity")) {
    const auto parsed = parse_quantity(*q);
    if (!parsed) bad_key(s->sub("quantity"), "unknown quantity '" + *q + "'");
    out.quantity = *parsed;
  }
  s->finish();
  return out;
}

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& source_dir) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character
    const auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    const std::size_t at = what.find("column");
    const std::size_t cut = at == std::string::npos ? at : what.find(": ", at);
    if (cut != std::string::npos) what = what.substr(cut + 2);
    throw ParseError("config line " + std::to_string(line) + ", column " + std::to_string(col) +
                     ": " + what);
  }
  Section root(j, "");
  if (const json* v = root.get("format")) {
    if (!v->is_number_integer() || v->get<int>() != 1) bad_key("format", "only format 1 is known");
  }
  root.string_opt("description");
  OptomechSystem system = parse_system(root);
  DriveSpec drive = parse_drive(root);
  GridSpec grid = parse_grid(root);
  NoiseSpec noise = parse_noise(root);
  FitSpec fit = parse_fit(root, source_dir);
  EigenSpec eigen = parse_eigen(root);
  RegimeSpec regime = parse_regime(root);
  SweepSpec sweep = parse_sweep(root, source_dir);
  SimulateSpec simulate = parse_simulate(root);
  root.finish();
  return RunConfig{std::move(system), drive,  std::move(grid),  noise,     std::move(fit),
                   eigen,             regime, std::move(sweep), simulate, source_dir};
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_config(text, path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

DriveState make_drive(const DriveSpec& spec, const OptomechSystem& system, double photon_number) {
  switch (spec.mode) {
    case DriveSpec::Mode::detuning:
      return DriveState::at_detuning(system, photon_number, spec.value);
    case DriveSpec::Mode::frequency:
      return DriveState(system, photon_number, spec.value);
    case DriveSpec::Mode::red_sideband:
      break;
  }
  return DriveState::red_sideband(system, photon_number, spec.track_detuning);
}

DriveState make_drive(const DriveSpec& spec, const OptomechSystem& system) {
  return make_drive(spec, system, spec.photon_number);
}

GridSegment parse_grid_flag(std::string_view text, GridReference reference) {
  double v[3];
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t comma = k < 2 ? text.find(',', pos) : text.size();
    if (comma == std::string_view::npos) throw ParseError("--grid expects start,stop,points");
    const std::string_view part = text.substr(pos, comma - pos);
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v[k]);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty() ||
        !std::isfinite(v[k])) {
      throw ParseError("--grid: not a number: '" + std::string(part) + "'");
    }
    pos = comma + 1;
  }
  if (!(v[1] > v[0])) throw ParseError("--grid: stop must exceed start");
  if (v[2] < 2 || v[2] != std::floor(v[2]) || v[2] > 1e8) {
    throw ParseError("--grid: points must be an integer >= 2");
  }
  return {hz_to_rad(v[0]), hz_to_rad(v[1]), static_cast<std::size_t>(v[2]), reference};
}

}  // namespace optomech
