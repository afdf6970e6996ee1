#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "optomech/config.hpp"
#include "optomech/fit.hpp"

namespace optomech {

// Process exit codes.
enum class ExitCode : int {
  ok = 0,
  failure = 1,    // I/O and anything unclassified
  parse = 2,      // command line, config or trace file
  invariant = 3,  // physically or mathematically invalid input
  solver = 4,     // eigensolver failure, fit not converged
};

struct CommandOptions {
  std::string command;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> trace;  // fit, reconstruct
  std::optional<std::uint64_t> seed;
  std::optional<std::string> grid;  // "start,stop,points" in Hz
  bool track_detuning = false;
  std::optional<std::size_t> modes;
};

// Runs one subcommand. Payloads go to --out when given, else to out; the
// short summary goes to out when the payload went to a file, else to err.
// Errors are reported on err and mapped to an exit code.
int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err);

// Exceptions of run_command's callees, mapped the same way.
ExitCode exit_code_for(const std::exception& e);

// FitResult record: parameters and sigmas in file units (null for an
// unidentified parameter), cost, iterations, converged, status, message,
// gradient, degrees_of_freedom, the full model in Hz and derived quantities.
// like supplies n_th for the derived block.
std::string fit_result_json(const FitResult& result, const OptomechSystem& like);
// Model block of a fit result record.
ModelParameters parse_fit_model(std::string_view record_text);

std::string regime_label(const RegimeReport& report);

}  // namespace optomech
