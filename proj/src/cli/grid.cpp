#include <algorithm>

#include "optomech/config.hpp"
#include "optomech/errors.hpp"

namespace optomech {

std::vector<double> linear_grid(double start, double stop, std::size_t points) {
  if (points < 2 || !(stop > start)) throw InvariantError("grid needs stop > start and >= 2 points");
  std::vector<double> g(points);
  const double span = stop - start;
  const double last = static_cast<double>(points - 1);
  for (std::size_t i = 0; i + 1 < points; ++i) g[i] = start + span * static_cast<double>(i) / last;
  g.back() = stop;
  return g;
}

std::vector<double> build_grid(const GridSpec& spec, const OptomechSystem& system,
                               const DriveState& drive) {
  if (!spec.main) throw ParseError("no frequency grid: add a grid section or pass --grid");
  const GridSegment& seg = *spec.main;
  double origin = 0.0;
  switch (seg.reference) {
    case GridReference::absolute: origin = 0.0; break;
    case GridReference::cavity: origin = drive.cavity_frequency(); break;
    case GridReference::drive: origin = drive.drive_frequency(); break;
  }
  std::vector<double> grid = linear_grid(origin + seg.start, origin + seg.stop, seg.points);

  if (spec.mechanical_points > 0) {
    const MechMode& m = system.fundamental();
    const double kappa = system.cavity().kappa();
    const double g = drive.coupling();
    const double width = m.linewidth() + 4.0 * g * g / kappa;
    const double half = std::min(spec.mechanical_half_width * width, 0.5 * kappa);
    const double centre = drive.drive_frequency() + m.frequency();
    const std::vector<double> fine = linear_grid(centre - half, centre + half, spec.mechanical_points);
    std::vector<double> merged;
    merged.reserve(grid.size() + fine.size());
    std::merge(grid.begin(), grid.end(), fine.begin(), fine.end(), std::back_inserter(merged));
    grid.clear();
    for (double w : merged) {
      if (grid.empty() || w > grid.back()) grid.push_back(w);
    }
  }
  if (!(grid.front() > 0.0)) throw InvariantError("grid reaches non-positive frequencies");
  return grid;
}

}  // namespace optomech
