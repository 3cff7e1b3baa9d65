#pragma once

#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluidnav/flow_field.hpp"
#include "fluidnav/scenario_file.hpp"

namespace fluidnav {

struct Bounds {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 1.0;
  double y_max = 1.0;
};

struct GridPoint {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  bool inside_disk = false;
};

// Samples (phi, psi) on a resolution x resolution lattice, rows of constant y
// from y_min upwards. Points inside a disk are flagged but still evaluated;
// singular centers get NaN.
inline std::vector<GridPoint> dump_field_grid(const FlowField& field, const Bounds& bounds, int resolution) {
  if (resolution < 2) throw std::invalid_argument("dump_field_grid: resolution must be at least 2");
  std::vector<GridPoint> grid;
  grid.reserve(static_cast<std::size_t>(resolution) * resolution);
  const double step_x = (bounds.x_max - bounds.x_min) / (resolution - 1);
  const double step_y = (bounds.y_max - bounds.y_min) / (resolution - 1);
  for (int j = 0; j < resolution; ++j) {
    const double y = j + 1 == resolution ? bounds.y_max : bounds.y_min + j * step_y;
    for (int i = 0; i < resolution; ++i) {
      const double x = i + 1 == resolution ? bounds.x_max : bounds.x_min + i * step_x;
      GridPoint p{x, y, 0.0, 0.0, inside_any_disk({x, y}, field)};
      try {
        const PotentialStreamPair v = eval({x, y}, field);
        p.phi = v.phi;
        p.psi = v.psi;
      } catch (const SingularPoint&) {
        p.phi = std::numeric_limits<double>::quiet_NaN();
        p.psi = std::numeric_limits<double>::quiet_NaN();
        p.inside_disk = true;
      }
      grid.push_back(p);
    }
  }
  return grid;
}

inline std::string format_field_grid(const std::vector<GridPoint>& grid) {
  std::string out = "x,y,phi,psi,inside_disk\n";
  char buffer[160];
  for (const auto& p : grid) {
    const int n = std::snprintf(buffer, sizeof buffer, "%.17g,%.17g,%.17g,%.17g,%d\n", p.x, p.y, p.phi, p.psi,
                                p.inside_disk ? 1 : 0);
    out.append(buffer, static_cast<std::size_t>(n));
  }
  return out;
}

inline void write_field_grid(const std::vector<GridPoint>& grid, const std::string& path) {
  write_text_file(path, format_field_grid(grid));
}

}  // namespace fluidnav
