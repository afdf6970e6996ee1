#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optomech/core.hpp"
#include "optomech/fit.hpp"
#include "optomech/response.hpp"

namespace optomech {

enum class GridReference { absolute, cavity, drive };

// Frequencies in rad/s, relative to the reference point.
struct GridSegment {
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 0;
  GridReference reference = GridReference::cavity;
};

struct GridSpec {
  std::optional<GridSegment> main;
  // Extra dense window around omega_d + Omega_1 spanning
  // +- half_width (Gamma + 4 g^2 / kappa), capped at kappa / 2.
  std::size_t mechanical_points = 0;
  double mechanical_half_width = 10.0;
};

struct DriveSpec {
  enum class Mode { red_sideband, detuning, frequency };
  double photon_number = 0.0;
  Mode mode = Mode::red_sideband;
  double value = 0.0;  // detuning or absolute drive frequency, rad/s
  bool track_detuning = false;
};

struct NoiseSpec {
  double sigma = 0.0;
  bool relative = false;  // sigma is a fraction of max |T| of the clean trace
  std::uint64_t seed = 0;
};

struct FitSpec {
  DefaultFitOptions defaults;
  std::vector<ParameterSpec> parameters;  // explicit set, rad/s; empty means defaults
  std::vector<ParameterId> fixed;         // removed from the default set
  FitConfig solver;                       // tolerances and flags; parameters unused
  std::optional<std::filesystem::path> start_from;  // earlier fit result
};

struct EigenSpec {
  std::optional<GridSegment> coupling_sweep;  // reference unused
};

struct RegimeSpec {
  enum class Table { none, boundaries, trajectory };
  Table table = Table::none;
  double kappa_over_omega_min = 1e-3;
  double kappa_over_omega_max = 1.0;
  std::size_t boundary_points = 61;
  double photon_min = 1.0;
  double photon_max = 1e9;
  std::size_t trajectory_points = 49;
};

struct SweepTrace {
  double photon_number = 0.0;
  std::filesystem::path path;
};

struct SweepSpec {
  std::vector<double> photon_numbers;  // synthesized when traces is empty
  std::vector<SweepTrace> traces;
  double kappa_bound_factor = 3.0;
  bool warm_start = true;
};

struct SimulateSpec {
  Quantity quantity = Quantity::transmission;
};

/// Parsed configuration file. Every frequency in the file is in Hz; values
/// here are already converted to rad/s.
struct RunConfig {
  OptomechSystem system;
  DriveSpec drive;
  GridSpec grid;
  NoiseSpec noise;
  FitSpec fit;
  EigenSpec eigen;
  RegimeSpec regime;
  SweepSpec sweep;
  SimulateSpec simulate;
  std::filesystem::path source_dir;
};

// Strict parse: unknown keys and wrong types raise ParseError naming the key;
// JSON syntax errors report line and column. Physical invariants raise
// InvariantError.
RunConfig parse_config(std::string_view text, const std::filesystem::path& source_dir = {});
RunConfig load_config(const std::filesystem::path& path);

DriveState make_drive(const DriveSpec& spec, const OptomechSystem& system);
DriveState make_drive(const DriveSpec& spec, const OptomechSystem& system, double photon_number);

// "start,stop,points" in Hz.
GridSegment parse_grid_flag(std::string_view text, GridReference reference);

std::vector<double> linear_grid(double start, double stop, std::size_t points);
// Sorted union of the main segment and the optional mechanical window.
std::vector<double> build_grid(const GridSpec& spec, const OptomechSystem& system,
                               const DriveState& drive);

}  // namespace optomech
