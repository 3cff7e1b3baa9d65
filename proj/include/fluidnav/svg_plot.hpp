#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluidnav/scenario.hpp"
#include "fluidnav/scenario_file.hpp"
#include "fluidnav/trajectory_log.hpp"

namespace fluidnav {

namespace detail {

inline const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                       "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

inline std::string num(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.3f", value);
  std::string s = buffer;
  if (s == "-0.000") s = "0.000";
  return s;
}

struct PlotFrame {
  double x_min, y_max, scale, margin;
  double px(double x) const { return margin + (x - x_min) * scale; }
  double py(double y) const { return margin + (y_max - y) * scale; }
};

}  // namespace detail

// Paths are solid polylines (one per agent), the straight start-to-goal line
// is dashed, unsafe zones are shaded circles of radius delta_h around faulty
// (SNCF) or non-cooperative (TVNC, final position) agents.
inline std::string render_svg(const TrajectoryLog& log, const ScenarioSpec& spec) {
  if (log.ticks.empty()) throw std::invalid_argument("render_svg: empty log");

  std::map<int, std::vector<Complex>> paths;
  for (const auto& tick : log.ticks) {
    for (const auto& row : tick.agents) paths[row.id].push_back(row.position);
  }
  struct Zone {
    Complex center;
    double radius;
  };
  std::vector<Zone> zones;
  for (const auto& row : log.ticks.back().agents) {
    if (spec.regime == Regime::Sncf && row.role == Role::Faulty) zones.push_back({row.position, spec.delta_h});
    if (spec.regime == Regime::Tvnc && row.role == Role::NonCooperative) {
      const AgentState* a = spec.find_agent(row.id);
      zones.push_back({row.position, a ? spec.radius_of(*a) : spec.delta_h});
    }
  }

  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  auto extend = [&](Complex z, double r) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return;
    x_lo = std::min(x_lo, z.real() - r);
    x_hi = std::max(x_hi, z.real() + r);
    y_lo = std::min(y_lo, z.imag() - r);
    y_hi = std::max(y_hi, z.imag() + r);
  };
  for (const auto& [id, pts] : paths) {
    for (Complex z : pts) extend(z, 0.0);
  }
  for (const auto& zone : zones) extend(zone.center, zone.radius);
  for (const auto& a : spec.agents) {
    if (a.goal) extend(*a.goal, 0.05);
  }
  if (x_lo > x_hi) x_lo = x_hi = y_lo = y_hi = 0.0;
  const double span = std::max({x_hi - x_lo, y_hi - y_lo, 1e-3});
  const double plot_size = 600.0;
  const detail::PlotFrame frame{x_lo, y_hi, plot_size / span, 40.0};
  const double width = 2 * frame.margin + (x_hi - x_lo) * frame.scale + 160.0;
  const double height = 2 * frame.margin + (y_hi - y_lo) * frame.scale;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(width) + "\" height=\"" +
         detail::num(height) + "\" viewBox=\"0 0 " + detail::num(width) + " " + detail::num(height) + "\">\n";
  out += "<title>fluidnav " + std::string(to_string(spec.regime)) + " trajectories</title>\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + detail::num(width) + "\" height=\"" + detail::num(height) +
         "\" fill=\"white\"/>\n";

  for (const auto& zone : zones) {
    out += "<circle class=\"unsafe-zone\" cx=\"" + detail::num(frame.px(zone.center.real())) + "\" cy=\"" +
           detail::num(frame.py(zone.center.imag())) + "\" r=\"" + detail::num(zone.radius * frame.scale) +
           "\" fill=\"#2ca02c\" fill-opacity=\"0.25\" stroke=\"#2ca02c\"/>\n";
  }

  std::size_t colour = 0;
  for (const auto& [id, pts] : paths) {
    const char* stroke = detail::kPalette[colour++ % std::size(detail::kPalette)];
    const AgentState* declared = spec.find_agent(id);
    if (declared && declared->goal) {
      const Complex g = *declared->goal;
      out += "<line class=\"desired\" x1=\"" + detail::num(frame.px(pts.front().real())) + "\" y1=\"" +
             detail::num(frame.py(pts.front().imag())) + "\" x2=\"" + detail::num(frame.px(g.real())) + "\" y2=\"" +
             detail::num(frame.py(g.imag())) + "\" stroke=\"" + stroke +
             "\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n";
      const double gx = frame.px(g.real());
      const double gy = frame.py(g.imag());
      out += "<path class=\"goal\" d=\"M " + detail::num(gx - 5) + " " + detail::num(gy - 5) + " L " +
             detail::num(gx + 5) + " " + detail::num(gy + 5) + " M " + detail::num(gx - 5) + " " +
             detail::num(gy + 5) + " L " + detail::num(gx + 5) + " " + detail::num(gy - 5) + "\" stroke=\"" +
             stroke + "\" stroke-width=\"2\"/>\n";
    }
    out += "<polyline class=\"path\" data-agent=\"" + std::to_string(id) + "\" fill=\"none\" stroke=\"" + stroke +
           "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (Complex z : pts) {
      if (!first) out += ' ';
      first = false;
      out += detail::num(frame.px(z.real())) + "," + detail::num(frame.py(z.imag()));
    }
    out += "\"/>\n";
  }

  const double legend_x = width - 150.0;
  double legend_y = frame.margin;
  out += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  colour = 0;
  for (const auto& [id, pts] : paths) {
    const char* stroke = detail::kPalette[colour++ % std::size(detail::kPalette)];
    out += "<line x1=\"" + detail::num(legend_x) + "\" y1=\"" + detail::num(legend_y) + "\" x2=\"" +
           detail::num(legend_x + 20) + "\" y2=\"" + detail::num(legend_y) + "\" stroke=\"" + stroke +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + detail::num(legend_x + 26) + "\" y=\"" + detail::num(legend_y + 4) + "\">agent " +
           std::to_string(id) + "</text>\n";
    legend_y += 18.0;
  }
  if (!zones.empty()) {
    out += "<circle cx=\"" + detail::num(legend_x + 10) + "\" cy=\"" + detail::num(legend_y) +
           "\" r=\"6\" fill=\"#2ca02c\" fill-opacity=\"0.25\" stroke=\"#2ca02c\"/>\n";
    out += "<text x=\"" + detail::num(legend_x + 26) + "\" y=\"" + detail::num(legend_y + 4) +
           "\">unsafe zone</text>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

inline void render_plot(const TrajectoryLog& log, const ScenarioSpec& spec, const std::string& path) {
  write_text_file(path, render_svg(log, spec));
}

}  // namespace fluidnav
