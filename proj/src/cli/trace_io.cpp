#include "optomech/trace_io.hpp"

#include <unistd.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "optomech/errors.hpp"
#include "optomech/units.hpp"

namespace optomech {

namespace {

constexpr std::string_view kMagic = "# optomech-trace 1";
constexpr std::string_view kColumns = "frequency_hz,re,im";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ParseError("trace line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(line, "not a number: '" + std::string(s) + "'");
  }
  if (!std::isfinite(v)) fail(line, "non-finite value");
  return v;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw InvariantError("cannot format number");
  return std::string(buf.data(), ptr);
}

std::string format_trace(const TraceFile& file) {
  std::ostringstream out;
  const TraceMetadata& m = file.metadata;
  out << kMagic << '\n';
  out << "# quantity: " << quantity_name(file.trace.quantity()) << '\n';
  out << "# frame: " << m.frame << '\n';
  if (m.drive_frequency) out << "# drive_frequency_hz: " << format_double(rad_to_hz(*m.drive_frequency)) << '\n';
  if (m.photon_number) out << "# photon_number: " << format_double(*m.photon_number) << '\n';
  if (m.seed) out << "# seed: " << *m.seed << '\n';
  if (m.noise_sigma) out << "# noise_sigma: " << format_double(*m.noise_sigma) << '\n';
  out << kColumns << '\n';
  const auto f = file.trace.frequencies();
  const auto v = file.trace.values();
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << format_double(rad_to_hz(f[i])) << ',' << format_double(v[i].real()) << ','
        << format_double(v[i].imag()) << '\n';
  }
  return out.str();
}

TraceFile parse_trace(std::string_view text) {
  if (trim(text).empty()) throw ParseError("trace file is empty");
  std::optional<Quantity> quantity;
  TraceMetadata meta;
  std::vector<double> freqs;
  std::vector<cplx> values;
  bool magic = false, columns = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view() : text.substr(eol + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!magic) {
      if (line != kMagic) fail(line_no, "missing '" + std::string(kMagic) + "' header");
      magic = true;
      continue;
    }
    if (line.front() == '#') {
      if (columns) fail(line_no, "header line after data");
      const std::string_view body = trim(line.substr(1));
      const std::size_t colon = body.find(':');
      if (colon == std::string_view::npos) fail(line_no, "header needs 'key: value'");
      const std::string_view key = trim(body.substr(0, colon));
      const std::string_view value = trim(body.substr(colon + 1));
      if (key == "quantity") {
        quantity = parse_quantity(value);
        if (!quantity) fail(line_no, "unknown quantity '" + std::string(value) + "'");
      } else if (key == "frame") {
        if (value != "lab" && value != "drive") fail(line_no, "frame must be lab or drive");
        meta.frame = std::string(value);
      } else if (key == "drive_frequency_hz") {
        meta.drive_frequency = hz_to_rad(parse_number(value, line_no));
      } else if (key == "photon_number") {
        meta.photon_number = parse_number(value, line_no);
      } else if (key == "seed") {
        std::uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
        if (ec != std::errc() || ptr != value.data() + value.size()) fail(line_no, "bad seed");
        meta.seed = seed;
      } else if (key == "noise_sigma") {
        meta.noise_sigma = parse_number(value, line_no);
      } else {
        fail(line_no, "unknown header key '" + std::string(key) + "'");
      }
      continue;
    }
    if (!columns) {
      if (line != kColumns) fail(line_no, "expected column line '" + std::string(kColumns) + "'");
      columns = true;
      continue;
    }
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      fail(line_no, "expected three comma-separated columns");
    }
    freqs.push_back(hz_to_rad(parse_number(line.substr(0, c1), line_no)));
    values.emplace_back(parse_number(line.substr(c1 + 1, c2 - c1 - 1), line_no),
                        parse_number(line.substr(c2 + 1), line_no));
    if (freqs.size() > 1 && !(freqs.back() > freqs[freqs.size() - 2])) {
      fail(line_no, "frequencies must be strictly increasing");
    }
  }
  if (!magic) throw ParseError("trace file is empty");
  if (!quantity) throw ParseError("trace header lacks a quantity line");
  if (!columns) throw ParseError("trace file lacks the column line");
  if (freqs.empty()) throw ParseError("trace file holds no data rows");
  return {ComplexTrace(*quantity, std::move(freqs), std::move(values)), meta};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TraceFile read_trace(const std::filesystem::path& path) {
  try {
    return parse_trace(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw std::runtime_error("cannot move output into place at " + path.string() + ": " +
                             ec.message());
  }
}

void write_trace(const std::filesystem::path& path, const TraceFile& file) {
  write_file_atomic(path, format_trace(file));
}

}  // namespace optomech
