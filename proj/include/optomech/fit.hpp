#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optomech/core.hpp"
#include "optomech/response.hpp"
#include "optomech/spectrum.hpp"

namespace optomech {

struct MechTerm {
  double frequency = 0.0;
  double linewidth = 0.0;
  double weight = 1.0;  // (g_i / g_1)^2; fixed at 1 for the fundamental
};

/// Flat parameter vector of the transmission model, rad/s throughout.
///
/// cavity_frequency is the loaded cavity frequency seen by this trace. When
/// photon_number is set the coupling becomes g0 sqrt(n) and the cavity moves by
/// shift_per_photon * (n - reference_photon_number), so n can be fitted through
/// its two signatures together.
struct ModelParameters {
  double cavity_frequency = 0.0;
  double kappa_port1 = 0.0;
  double kappa_port2 = 0.0;
  double kappa_internal = 0.0;
  std::vector<MechTerm> modes;
  double coupling = 0.0;
  double drive_frequency = 0.0;

  std::optional<double> photon_number;
  double g0 = 0.0;
  double shift_per_photon = 0.0;
  double reference_photon_number = 0.0;

  // additive instrument background a + b (omega - background_reference)
  cplx background_offset{0.0, 0.0};
  cplx background_slope{0.0, 0.0};
  double background_reference = 0.0;

  double kappa() const { return kappa_port1 + kappa_port2 + kappa_internal; }
  double effective_coupling() const;
  double effective_cavity_frequency() const;
  double detuning() const { return drive_frequency - effective_cavity_frequency(); }
};

ModelParameters model_parameters(const OptomechSystem& system, const DriveState& drive);

// Throws InvariantError for anything the response model cannot represent.
void validate(const ModelParameters& p);

kernels::ResponseModel response_model(const ModelParameters& p);

// Model transmission at absolute lab frequencies, background included.
std::vector<cplx> evaluate(const ModelParameters& p, std::span<const double> grid,
                           kernels::Isa isa = kernels::best_isa());

// Device view of a fitted model. The template supplies n_th and the Kerr
// split; photon number comes from the fit when it was a parameter, else from
// the template drive. g0_i = g0_1 sqrt(w_i).
OptomechSystem to_system(const ModelParameters& p, const OptomechSystem& like,
                         double photon_number);
DriveState to_drive(const ModelParameters& p, const OptomechSystem& fitted, double photon_number);

enum class ParamKind {
  cavity_frequency,
  kappa_port1,
  kappa_port2,
  kappa_internal,
  mech_frequency,
  mech_linewidth,
  mode_weight,
  coupling,
  photon_number,
  background_offset_re,
  background_offset_im,
  background_slope_re,
  background_slope_im,
};

struct ParameterId {
  ParamKind kind = ParamKind::coupling;
  std::size_t mode = 0;  // zero-based; names use one-based "modeN."

  std::string name() const;
  static std::optional<ParameterId> parse(std::string_view name);

  // Rates are fitted as log values; frequencies, weights and background linearly.
  bool log_scale() const;
  // Multiplier from internal units to file units (Hz, 1/Hz or dimensionless).
  double file_scale() const;

  friend bool operator==(const ParameterId&, const ParameterId&) = default;
};

double get_parameter(const ModelParameters& p, const ParameterId& id);
void set_parameter(ModelParameters& p, const ParameterId& id, double value);

struct ParameterSpec {
  ParameterId id;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> initial;  // overrides the value in the starting model
};

struct FitConfig {
  std::vector<ParameterSpec> parameters;
  int max_iterations = 200;
  // scaled gradient max_j |J_j . r| / (|J_j| |r|)
  double gradient_tolerance = 1e-6;
  // predicted relative change of |r| produced by a step
  double step_tolerance = 1e-10;
  // relative cost reduction of an accepted step
  double cost_tolerance = 1e-12;
  // Forward-difference step: this fraction of the value for log-scaled
  // parameters, of the narrowest feature width it moves for frequencies.
  double difference_step = 1e-6;
  bool magnitude_only = false;
  std::vector<double> weights;  // per point; empty means uniform
  // Also start from initial_guess() on the trace and keep the better fit.
  bool auto_restart = true;
};

struct DefaultFitOptions {
  bool fit_photon_number = false;  // n_d instead of g; needs calibrated g0
  bool fit_port2 = false;
  bool fit_background = false;
  bool fit_higher_mode_weights = true;
  bool fit_mech_linewidth = true;  // unidentifiable once C >> 1
  double rate_factor = 10.0;        // log-space bounds [p / f, p f]
  double cavity_window = 5.0;       // +- this many kappa
  double frequency_window = 0.3;    // +- relative, mechanical frequencies
  double weight_ceiling = 4.0;      // weights in [0, max(ceiling w, 0.5)]
  double background_window = 1.0;   // |offset| bound; slope bound is this / kappa
};

// Vary {omega_c, kappa_1, kappa_i, Omega_1, Gamma_1, g or n_d} plus the weights
// of higher modes, with bounds built around p.
FitConfig default_fit_config(const ModelParameters& p, const DefaultFitOptions& options = {});

// Throws InvariantError if a bound is infinite or reversed, a log-scaled bound
// is not positive, a parameter is listed twice, or the start lies outside.
void validate(const FitConfig& config, const ModelParameters& start);

struct ResidualOptions {
  bool magnitude_only = false;
  std::span<const double> weights;
};

// [Re r_1, Im r_1, Re r_2, ...] with r_k = sqrt(w_k)(T_model - T_data), or
// sqrt(w_k)(|T_model| - |T_data|) when magnitude_only.
std::vector<double> residuals(const ModelParameters& p, const ComplexTrace& trace,
                              const ResidualOptions& options = {});
double cost(std::span<const double> residual_vector);

enum class FitStatus { converged, max_iterations, singular, stalled };

std::string_view fit_status_name(FitStatus s);

struct FittedParameter {
  ParameterId id;
  double value = 0.0;
  double sigma = 0.0;  // infinite if the parameter is not identified
};

struct FitResult {
  std::vector<FittedParameter> parameters;
  ModelParameters model;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  FitStatus status = FitStatus::converged;
  std::string message;
  double gradient = 0.0;
  std::size_t degrees_of_freedom = 0;
  std::vector<double> cost_history;  // one entry per accepted step, starting cost first
  ComplexTrace residual_trace{Quantity::transmission, {}, {}};  // model - data

  const FittedParameter* find(const ParameterId& id) const;
};

/// Bounded Levenberg-Marquardt on the trace. Failure to converge is reported
/// through status and message; invalid input throws InvariantError.
FitResult fit(const ComplexTrace& trace, const ModelParameters& start, const FitConfig& config);
FitResult fit(const ComplexTrace& trace, const OptomechSystem& system, const DriveState& drive,
              const FitConfig& config);

enum class DifferenceScheme { forward, central };

// Jacobian of residuals() with respect to the internal (log or linear)
// coordinates of config.parameters at start. Column-major, 2N x P.
std::vector<double> residual_jacobian(const ComplexTrace& trace, const ModelParameters& start,
                                      const FitConfig& config, DifferenceScheme scheme);

struct InitialGuess {
  double cavity_frequency = 0.0;
  double kappa = 0.0;
  double coupling = 0.0;  // NaN when not inferable
  double peak_magnitude = 0.0;
  bool strong = false;
  std::vector<double> mech_frequencies;  // detected, fundamental first
  std::vector<std::string> flags;        // reasons the guess is partial

  bool complete() const { return flags.empty(); }
};

/// Heuristic start values from |T|: cavity from the largest peak, kappa from
/// its half-power width, mechanical features from prominence-ranked extrema.
/// Mechanical frequencies need the drive frequency. Throws InvariantError on a
/// featureless trace.
InitialGuess initial_guess(const ComplexTrace& trace, std::size_t n_modes,
                           std::optional<double> drive_frequency = std::nullopt);

// Writes the inferred quantities into base; rates keep their ratios.
ModelParameters apply_guess(const InitialGuess& guess, const ModelParameters& base);

/// Quantities derived from a fit for labelling. Cooperativities use the
/// device's intrinsic Gamma_1 and n_th, not the fitted linewidth, which
/// carries no information once 4g^2/kappa dominates it. detuning is snapped
/// to -Omega_1 when the fitted sideband offset is within 3 sigma of zero.
struct FitSummary {
  double coupling = 0.0;
  double coupling_sigma = 0.0;
  double kappa = 0.0;
  double detuning = 0.0;
  MechFrequencies frequencies;
  Cooperativity cooperativity{};
  RegimeReport report;
};

FitSummary summarize_fit(const FitResult& result, const OptomechSystem& device);

struct SweepPoint {
  double photon_number = 0.0;  // nominal
  double drive_frequency = 0.0;
  ComplexTrace trace;
};

struct SweepOptions {
  DefaultFitOptions fit_options;
  // kappa_1 and kappa_i stay inside [k / f, k f] of the starting device
  double kappa_bound_factor = 3.0;
  bool warm_start = true;
  FitConfig solver;  // tolerances, weights and iteration limit; parameters ignored
};

struct SweepRow {
  double photon_number = 0.0;
  bool ok = false;
  std::string error;
  FitResult fit;
  double coupling = 0.0;
  double coupling_sigma = 0.0;
  double kappa = 0.0;
  MechFrequencies frequencies;
  Cooperativity cooperativity{};
  Regime regime = Regime::sub_cooperative;
  double kappa_lower = 0.0;
  double kappa_upper = 0.0;
};

/// Sequential fits over traces ordered by drive strength. Each fit starts
/// from the previous result with g scaled by sqrt(n / n_prev) and the cavity
/// moved by the per-photon shift. Failures are recorded and the sweep goes on.
std::vector<SweepRow> power_sweep_extract(std::span<const SweepPoint> points,
                                          const OptomechSystem& system,
                                          const SweepOptions& options = {});

}  // namespace optomech
