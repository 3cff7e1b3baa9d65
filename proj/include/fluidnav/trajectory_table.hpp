#pragma once

// Trajectory tables: comma-separated text, one row per (tick, agent), header
//
//   t,agent_id,cluster,x,y,phi,psi,beta,theta,role,event_flags
//
// Reals use 17 significant digits so that parse(format(log)) is bit-exact.
// phi, psi, beta and theta are empty for agents that no field drives;
// event_flags is a '|'-separated list of event names.

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fluidnav/errors.hpp"
#include "fluidnav/scenario_file.hpp"
#include "fluidnav/trajectory_log.hpp"

namespace fluidnav {

inline constexpr std::string_view kTrajectoryHeader = "t,agent_id,cluster,x,y,phi,psi,beta,theta,role,event_flags";

namespace detail {

inline void append_real(std::string& out, double value) {
  char buffer[40];
  const int n = std::snprintf(buffer, sizeof buffer, "%.17g", value);
  out.append(buffer, static_cast<std::size_t>(n));
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_real(std::string_view text, int line, int column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw SyntaxError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": bad number '" +
                          std::string(text) + "'",
                      line, column);
  }
  return value;
}

inline int parse_int(std::string_view text, int line, int column) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw SyntaxError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": bad integer '" +
                          std::string(text) + "'",
                      line, column);
  }
  return value;
}

}  // namespace detail

inline std::string format_trajectory(const TrajectoryLog& log) {
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& tick : log.ticks) {
    for (const auto& row : tick.agents) {
      detail::append_real(out, tick.time);
      out += ',';
      out += std::to_string(row.id);
      out += ',';
      out += std::to_string(row.cluster);
      out += ',';
      detail::append_real(out, row.position.real());
      out += ',';
      detail::append_real(out, row.position.imag());
      out += ',';
      if (row.potential) detail::append_real(out, row.potential->phi);
      out += ',';
      if (row.potential) detail::append_real(out, row.potential->psi);
      out += ',';
      if (row.beta) out += std::to_string(*row.beta);
      out += ',';
      if (row.theta) detail::append_real(out, *row.theta);
      out += ',';
      out += to_string(row.role);
      out += ',';
      out += format_flags(row.flags);
      out += '\n';
    }
  }
  return out;
}

// Inverse of format_trajectory. Ticks are delimited by changes of t; the
// returned log has no fields attached (see attach_fields).
inline TrajectoryLog parse_trajectory_text(std::string_view text) {
  TrajectoryLog log;
  int line_number = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text.remove_prefix(newline == std::string_view::npos ? text.size() : newline + 1);
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kTrajectoryHeader) throw SyntaxError("line 1: missing or malformed header", 1, 1);
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 11) {
      throw SyntaxError("line " + std::to_string(line_number) + ": expected 11 fields, found " +
                            std::to_string(f.size()),
                        line_number, 1);
    }
    const double t = detail::parse_real(f[0], line_number, 1);
    AgentRecord row;
    row.id = detail::parse_int(f[1], line_number, 2);
    row.cluster = detail::parse_int(f[2], line_number, 3);
    row.position = {detail::parse_real(f[3], line_number, 4), detail::parse_real(f[4], line_number, 5)};
    if (f[5].empty() != f[6].empty()) {
      throw SyntaxError("line " + std::to_string(line_number) + ": phi and psi must both be present or absent",
                        line_number, 6);
    }
    if (!f[5].empty()) {
      row.potential = PotentialStreamPair{detail::parse_real(f[5], line_number, 6),
                                          detail::parse_real(f[6], line_number, 7)};
    }
    if (!f[7].empty()) row.beta = detail::parse_int(f[7], line_number, 8);
    if (!f[8].empty()) row.theta = detail::parse_real(f[8], line_number, 9);
    const auto role = role_from_string(f[9]);
    if (!role) throw SyntaxError("line " + std::to_string(line_number) + ": unknown role", line_number, 10);
    row.role = *role;
    const auto flags = parse_flags(f[10]);
    if (!flags) throw SyntaxError("line " + std::to_string(line_number) + ": unknown event flag", line_number, 11);
    row.flags = *flags;

    if (log.ticks.empty() || log.ticks.back().time != t) {
      if (!log.ticks.empty() && !(t > log.ticks.back().time)) {
        throw SyntaxError("line " + std::to_string(line_number) + ": time is not increasing", line_number, 1);
      }
      log.ticks.push_back(TickRecord{t, {}, {}});
    }
    log.ticks.back().agents.push_back(row);
  }
  if (!header_seen) throw SyntaxError("empty trajectory table", 1, 1);
  return log;
}

inline void write_trajectory(const TrajectoryLog& log, const std::string& path) {
  write_text_file(path, format_trajectory(log));
}

inline TrajectoryLog parse_trajectory(const std::string& path) {
  try {
    return parse_trajectory_text(read_text_file(path));
  } catch (const SyntaxError& e) {
    throw SyntaxError(path + ": " + e.what(), e.line(), e.column());
  }
}

}  // namespace fluidnav
