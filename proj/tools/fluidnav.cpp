// fluidnav command line: run, audit, plot and field subcommands.
//
// Exit codes: 0 success, 1 invalid input (syntax, schema, regime, IO, flags),
// 2 audit found a safety violation.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fluidnav/fluidnav.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitViolation = 2;

void print_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << '\n';
  if (const auto* invalid = dynamic_cast<const fluidnav::InvalidSpec*>(&e)) {
    for (const auto& d : invalid->diagnostics()) std::cerr << "  " << d << '\n';
  }
}

int cmd_run(const std::string& scenario, const std::string& out, const std::string& plot) {
  const fluidnav::ScenarioSpec spec = fluidnav::parse_scenario(scenario);
  const fluidnav::TrajectoryLog log = fluidnav::run(spec);
  fluidnav::write_trajectory(log, out);
  if (!plot.empty()) fluidnav::render_plot(log, spec, plot);
  for (const auto& w : log.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "wrote " << log.ticks.size() << " ticks to " << out << '\n';
  return kExitOk;
}

int cmd_audit(const std::string& table, const std::string& scenario) {
  const fluidnav::ScenarioSpec spec = fluidnav::parse_scenario(scenario);
  const fluidnav::TrajectoryLog log = fluidnav::parse_trajectory(table);
  const fluidnav::SafetyReport report = fluidnav::audit(log, spec);
  std::cout << fluidnav::format_report(report);
  return report.passed() ? kExitOk : kExitViolation;
}

int cmd_plot(const std::string& table, const std::string& scenario, const std::string& out) {
  const fluidnav::ScenarioSpec spec = fluidnav::parse_scenario(scenario);
  const fluidnav::TrajectoryLog log = fluidnav::parse_trajectory(table);
  if (log.ticks.empty()) throw fluidnav::IoError(table + ": trajectory table has no rows");
  fluidnav::render_plot(log, spec, out);
  return kExitOk;
}

fluidnav::Bounds default_bounds(const fluidnav::ScenarioSpec& spec) {
  fluidnav::Bounds b{1e300, 1e300, -1e300, -1e300};
  auto extend = [&](fluidnav::Complex z) {
    b.x_min = std::min(b.x_min, z.real());
    b.x_max = std::max(b.x_max, z.real());
    b.y_min = std::min(b.y_min, z.imag());
    b.y_max = std::max(b.y_max, z.imag());
  };
  for (const auto& a : spec.agents) {
    extend(a.position);
    if (a.goal) extend(*a.goal);
  }
  b.x_min -= 1.0;
  b.y_min -= 1.0;
  b.x_max += 1.0;
  b.y_max += 1.0;
  return b;
}

int cmd_field(const std::string& scenario, double time, const std::string& out, std::optional<int> cluster,
              int resolution, const std::vector<double>& bounds) {
  fluidnav::ScenarioSpec spec = fluidnav::parse_scenario(scenario);
  const long tick = spec.tick_of(time);
  if (tick < 0 || tick > spec.n_steps) {
    throw fluidnav::SchemaError({"--time " + std::to_string(time) + " lies outside the scenario's time grid"});
  }
  const fluidnav::TrajectoryLog log = fluidnav::run(spec);
  if (static_cast<std::size_t>(tick) >= log.ticks.size()) {
    throw fluidnav::SchemaError({"--time " + std::to_string(time) + " lies after the run terminated"});
  }
  const fluidnav::TickRecord& record = log.ticks[static_cast<std::size_t>(tick)];
  const int wanted = cluster.value_or(record.fields.empty() ? 1 : record.fields.front().cluster);
  const fluidnav::FlowField* field = record.field_of(wanted);
  if (field == nullptr) {
    throw fluidnav::SchemaError({"--cluster " + std::to_string(wanted) + " has no flow field at that time"});
  }
  fluidnav::Bounds b = default_bounds(spec);
  if (!bounds.empty()) b = {bounds[0], bounds[1], bounds[2], bounds[3]};
  fluidnav::write_field_grid(fluidnav::dump_field_grid(*field, b, resolution), out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ideal-fluid-flow multi-agent navigation"};
  app.require_subcommand(1);

  std::string scenario, table, out, plot;
  auto* run = app.add_subcommand("run", "simulate a scenario and write its trajectory table");
  run->add_option("scenario", scenario, "scenario file (JSON)")->required();
  run->add_option("--out", out, "trajectory table to write")->required();
  run->add_option("--plot", plot, "also write an SVG plot");

  auto* audit = app.add_subcommand("audit", "check a trajectory table against its scenario");
  audit->add_option("table", table, "trajectory table")->required();
  audit->add_option("--spec", scenario, "scenario file")->required();

  auto* plot_cmd = app.add_subcommand("plot", "render a trajectory table as SVG");
  plot_cmd->add_option("table", table, "trajectory table")->required();
  plot_cmd->add_option("--spec", scenario, "scenario file")->required();
  plot_cmd->add_option("--out", out, "SVG file to write")->required();

  double time = 0.0;
  int resolution = 101;
  std::optional<int> cluster;
  std::vector<double> bounds;
  auto* field = app.add_subcommand("field", "sample the flow field at a given time");
  field->add_option("scenario", scenario, "scenario file")->required();
  field->add_option("--time", time, "simulation time (s), snapped to the nearest tick")->required();
  field->add_option("--out", out, "grid table to write")->required();
  field->add_option("--cluster", cluster, "cluster whose field is sampled (default: first)");
  field->add_option("--resolution", resolution, "points per axis")->check(CLI::Range(2, 10000));
  field->add_option("--bounds", bounds, "x_min y_min x_max y_max")->expected(4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*run) return cmd_run(scenario, out, plot);
    if (*audit) return cmd_audit(table, scenario);
    if (*plot_cmd) return cmd_plot(table, scenario, out);
    if (*field) return cmd_field(scenario, time, out, cluster, resolution, bounds);
  } catch (const fluidnav::Error& e) {
    print_error(e);
    return kExitInvalid;
  } catch (const std::exception& e) {
    print_error(e);
    return kExitInvalid;
  }
  return kExitInvalid;
}
