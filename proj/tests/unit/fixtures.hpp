#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "optomech/core.hpp"
#include "optomech/units.hpp"

namespace fixtures {

using namespace optomech;

inline OptomechSystem paper_system() {
  return OptomechSystem(Cavity::from_hz(6.506e9, 1.1e6, 25e3, 75e3),
                        {MechMode::from_hz(9.696e6, 31, 167)}, 76);
}

// fundamental plus four weaker modes; g0 ratios 0.35, 0.25, 0.2, 0.15
inline OptomechSystem five_mode_system() {
  return OptomechSystem(Cavity::from_hz(6.506e9, 1.1e6, 25e3, 75e3),
                        {MechMode::from_hz(9.696e6, 31, 167), MechMode::from_hz(15.43e6, 45, 167 * 0.35),
                         MechMode::from_hz(17.6e6, 50, 167 * 0.25), MechMode::from_hz(20.78e6, 60, 167 * 0.2),
                         MechMode::from_hz(22.26e6, 70, 167 * 0.15)},
                        76);
}

inline double photons_for(const OptomechSystem& sys, double g_hz) {
  return std::pow(hz_to_rad(g_hz) / sys.fundamental().g0(), 2);
}

// omega_d + nu over [lo, hi] (rad/s offsets)
inline std::vector<double> drive_grid(const DriveState& d, double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = d.drive_frequency() + lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

inline std::vector<double> cavity_grid(const DriveState& d, double half, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = d.cavity_frequency() - half + 2 * half * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

inline std::string config_path(const std::string& name) {
  return std::string(OPTOMECH_CONFIG_DIR) + "/" + name;
}

inline std::string data_path(const std::string& name) {
  return std::string(OPTOMECH_TEST_DATA) + "/" + name;
}

// header row dropped; every cell parsed as a double except "true"/"false"
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  double num(std::size_t r, std::size_t c) const { return std::stod(rows.at(r).at(c)); }
};

inline Csv parse_csv(std::istream& in) {
  Csv csv;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      csv.header = cells;
      first = false;
    } else {
      csv.rows.push_back(cells);
    }
  }
  return csv;
}

inline Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_csv(in);
}

}  // namespace fixtures
