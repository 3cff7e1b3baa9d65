#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fluidnav/clusters.hpp"
#include "fluidnav/flow_field.hpp"
#include "fluidnav/guidance.hpp"
#include "fluidnav/scenario.hpp"
#include "fluidnav/trajectory_log.hpp"

namespace fluidnav {

// Allowed penetration into a cylinder before the audit calls it a violation.
inline constexpr double kClearanceTolerance = 1e-3;

// Validates the scenario and dispatches to the regime's controller. The result
// depends on nothing but `spec`.
inline TrajectoryLog run(const ScenarioSpec& spec) {
  validate_spec(spec);
  switch (spec.regime) {
    case Regime::Sncf: return sncf_run(spec);
    case Regime::Tvnc: return tvnc_run(spec);
    case Regime::Tvc: return tvc_run(spec);
  }
  throw std::logic_error("run: unknown regime");
}

// Rebuilds the per-tick flow fields from logged positions, roles, headings and
// betas. For a log produced by run() this reproduces the original fields exactly.
inline std::vector<ClusterField> reconstruct_fields(const TickRecord& tick, const ScenarioSpec& spec) {
  std::map<int, const AgentRecord*> driven;  // cluster -> first field-bearing row
  for (const auto& row : tick.agents) {
    if (row.theta && row.beta && !driven.contains(row.cluster)) driven[row.cluster] = &row;
  }
  std::vector<ClusterField> fields;
  for (const auto& [cluster, row] : driven) {
    std::vector<Singularity> singularities;
    for (const auto& other : tick.agents) {
      const AgentState* declared = spec.find_agent(other.id);
      const double radius = declared ? spec.radius_of(*declared) : spec.delta_h;
      switch (spec.regime) {
        case Regime::Sncf:
          if (other.role == Role::Faulty) singularities.push_back({other.position, spec.delta_h});
          break;
        case Regime::Tvnc:
          if (other.role == Role::NonCooperative) singularities.push_back({other.position, radius});
          break;
        case Regime::Tvc:
          if (*row->beta == 1 && other.cluster != cluster) singularities.push_back({other.position, radius});
          break;
      }
    }
    fields.push_back({cluster, FlowField(*row->theta, *row->beta, std::move(singularities))});
  }
  return fields;
}

inline void attach_fields(TrajectoryLog& log, const ScenarioSpec& spec) {
  for (auto& tick : log.ticks) tick.fields = reconstruct_fields(tick, spec);
}

struct SafetyReport {
  double min_clearance = std::numeric_limits<double>::infinity();
  double min_intra_cluster_distance = std::numeric_limits<double>::infinity();
  double min_inter_cluster_distance = std::numeric_limits<double>::infinity();
  double max_psi_drift = 0.0;
  // Largest difference between logged (phi, psi) and a re-evaluation of the tick's field.
  double max_potential_mismatch = 0.0;
  bool non_finite = false;
  int field_rebuilds = 0;
  bool budget_exhausted = false;
  std::map<int, double> goal_residuals;  // final distance to goal per agent
  double aggregate_goal_residual = 0.0;
  std::map<int, int> fallback_counts;
  std::map<int, int> hold_counts;
  std::vector<double> tick_min_clearance;
  std::vector<double> tick_min_separation;
  std::vector<std::string> violations;

  bool passed() const noexcept { return violations.empty(); }
};

namespace detail {

inline bool finite_row(const AgentRecord& row) {
  return std::isfinite(row.position.real()) && std::isfinite(row.position.imag());
}

inline bool stepped(const AgentRecord& row) {
  constexpr EventFlags skipped = static_cast<EventFlags>(Event::Hold) | static_cast<EventFlags>(Event::AtGoal) |
                                 static_cast<EventFlags>(Event::ClusterHold) | static_cast<EventFlags>(Event::Dividing) |
                                 static_cast<EventFlags>(Event::Budget);
  return row.potential.has_value() && (row.flags & skipped) == 0;
}

inline std::string fmt(double value) {
  std::ostringstream out;
  out.precision(6);
  out << value;
  return out.str();
}

}  // namespace detail

inline SafetyReport audit(const TrajectoryLog& input, const ScenarioSpec& spec) {
  TrajectoryLog log = input;
  if (std::any_of(log.ticks.begin(), log.ticks.end(), [](const TickRecord& t) { return t.fields.empty(); })) {
    attach_fields(log, spec);
  }

  SafetyReport report;
  report.field_rebuilds = log.field_rebuilds();
  report.budget_exhausted = log.budget_exhausted();

  int worst_clearance_tick = -1;
  int worst_clearance_agent = 0;
  int worst_separation_tick = -1;
  std::pair<int, int> worst_pair{0, 0};
  double worst_separation = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < log.ticks.size(); ++k) {
    const TickRecord& tick = log.ticks[k];
    double tick_clearance = std::numeric_limits<double>::infinity();
    double tick_separation = std::numeric_limits<double>::infinity();

    for (const auto& row : tick.agents) {
      if (!detail::finite_row(row)) report.non_finite = true;
      if (has(row.flags, Event::Fallback)) ++report.fallback_counts[row.id];
      if (has(row.flags, Event::Hold)) ++report.hold_counts[row.id];
      if (!row.potential) continue;
      const FlowField* field = tick.field_of(row.cluster);
      if (field == nullptr) continue;
      const double clearance = disk_clearance(row.position, *field);
      tick_clearance = std::min(tick_clearance, clearance);
      if (clearance < report.min_clearance) {
        report.min_clearance = clearance;
        worst_clearance_tick = static_cast<int>(k);
        worst_clearance_agent = row.id;
      }
      try {
        const PotentialStreamPair again = eval(row.position, *field);
        report.max_potential_mismatch = std::max(
            report.max_potential_mismatch, std::abs(again.as_complex() - row.potential->as_complex()));
      } catch (const SingularPoint&) {
      }
    }

    for (std::size_t a = 0; a < tick.agents.size(); ++a) {
      for (std::size_t b = a + 1; b < tick.agents.size(); ++b) {
        const AgentRecord& p = tick.agents[a];
        const AgentRecord& q = tick.agents[b];
        // Pairs of undriven agents (frozen or scripted) are not the planner's concern.
        if (!p.potential && !q.potential) continue;
        const double d = std::abs(p.position - q.position);
        if (p.cluster == q.cluster) {
          report.min_intra_cluster_distance = std::min(report.min_intra_cluster_distance, d);
        } else {
          report.min_inter_cluster_distance = std::min(report.min_inter_cluster_distance, d);
        }
        tick_separation = std::min(tick_separation, d);
        if (d < worst_separation) {
          worst_separation = d;
          worst_separation_tick = static_cast<int>(k);
          worst_pair = {p.id, q.id};
        }
      }
    }
    report.tick_min_clearance.push_back(tick_clearance);
    report.tick_min_separation.push_back(tick_separation);

    if (k + 1 < log.ticks.size()) {
      const TickRecord& after = log.ticks[k + 1];
      for (const auto& row : tick.agents) {
        if (!detail::stepped(row)) continue;
        const FlowField* field = tick.field_of(row.cluster);
        auto moved = std::find_if(after.agents.begin(), after.agents.end(),
                                  [&](const AgentRecord& r) { return r.id == row.id; });
        if (field == nullptr || moved == after.agents.end()) continue;
        try {
          const double drift = std::abs(eval(moved->position, *field).psi - eval(row.position, *field).psi);
          report.max_psi_drift = std::max(report.max_psi_drift, drift);
        } catch (const SingularPoint&) {
        }
      }
    }
  }

  if (!log.ticks.empty()) {
    for (const auto& row : log.ticks.back().agents) {
      const AgentState* declared = spec.find_agent(row.id);
      if (declared == nullptr || !declared->goal) continue;
      const double residual = std::abs(*declared->goal - row.position);
      report.goal_residuals[row.id] = residual;
      if (row.role == Role::Cooperative) report.aggregate_goal_residual += residual;
    }
  }

  if (report.non_finite) report.violations.push_back("non-finite position logged");
  if (report.min_clearance < -kClearanceTolerance) {
    report.violations.push_back("agent " + std::to_string(worst_clearance_agent) + " inside a cylinder at tick " +
                                std::to_string(worst_clearance_tick) + " (clearance " +
                                detail::fmt(report.min_clearance) + " m)");
  }
  if (worst_separation < spec.safety_radius) {
    report.violations.push_back("agents " + std::to_string(worst_pair.first) + " and " +
                                std::to_string(worst_pair.second) + " closer than the safety radius at tick " +
                                std::to_string(worst_separation_tick) + " (" + detail::fmt(worst_separation) + " m)");
  }
  return report;
}

inline std::string format_report(const SafetyReport& r) {
  std::ostringstream out;
  out.precision(9);
  out << "min_cylinder_clearance_m " << r.min_clearance << '\n'
      << "min_intra_cluster_distance_m " << r.min_intra_cluster_distance << '\n'
      << "min_inter_cluster_distance_m " << r.min_inter_cluster_distance << '\n'
      << "max_psi_drift_m " << r.max_psi_drift << '\n'
      << "max_potential_mismatch " << r.max_potential_mismatch << '\n'
      << "field_rebuilds " << r.field_rebuilds << '\n'
      << "budget_exhausted " << (r.budget_exhausted ? "yes" : "no") << '\n'
      << "aggregate_goal_residual_m " << r.aggregate_goal_residual << '\n';
  for (const auto& [id, residual] : r.goal_residuals) out << "goal_residual agent=" << id << ' ' << residual << '\n';
  for (const auto& [id, count] : r.fallback_counts) out << "fallbacks agent=" << id << ' ' << count << '\n';
  for (const auto& [id, count] : r.hold_counts) out << "holds agent=" << id << ' ' << count << '\n';
  out << "violations " << r.violations.size() << '\n';
  for (const auto& v : r.violations) out << "violation " << v << '\n';
  return out.str();
}

}  // namespace fluidnav
