#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "optomech/response.hpp"

namespace optomech {

/// Header metadata of a trace file. frame is "lab" for absolute frequencies
/// and "drive" for offsets from the drive.
struct TraceMetadata {
  std::string frame = "lab";
  std::optional<double> drive_frequency;  // rad/s
  std::optional<double> photon_number;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise_sigma;
};

struct TraceFile {
  ComplexTrace trace;
  TraceMetadata metadata;
};

// Text format:
//   # optomech-trace 1
//   # quantity: transmission
//   # frame: lab
//   # drive_frequency_hz: ...      (optional header lines)
//   frequency_hz,re,im
//   <f>,<re>,<im>
// Numbers use the shortest decimal form that parses back to the same double.
std::string format_trace(const TraceFile& file);
TraceFile parse_trace(std::string_view text);

TraceFile read_trace(const std::filesystem::path& path);
void write_trace(const std::filesystem::path& path, const TraceFile& file);

// Shortest round-trip decimal form of x.
std::string format_double(double x);

// Writes to a temporary file beside path, then renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace optomech
