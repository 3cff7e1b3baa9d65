#pragma once

// Goal-directed guidance: bulk heading from goal offsets, the time-varying
// non-cooperative (TVNC) controller, forward-looking virtual boxes with the
// global conflict predicate zeta, and the time-varying cooperative (TVC)
// controller that switches exclusion on for every cluster while zeta holds.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "fluidnav/detail/tick.hpp"
#include "fluidnav/errors.hpp"
#include "fluidnav/flow_field.hpp"
#include "fluidnav/kinematics.hpp"
#include "fluidnav/scenario.hpp"
#include "fluidnav/trajectory_log.hpp"

namespace fluidnav {

inline constexpr double kAllAtGoalThreshold = 1e-12;

// Rectangle of width 2 * half_width whose rear edge is centered on `anchor`
// and which extends `length` forward along `heading`. Boundary points count as inside.
struct VirtualBox {
  Complex anchor;
  double heading = 0.0;
  double half_width = 0.0;
  double length = 0.0;

  bool contains(Complex point) const noexcept {
    const double dx = point.real() - anchor.real();
    const double dy = point.imag() - anchor.imag();
    const double c = std::cos(heading);
    const double s = std::sin(heading);
    const double along = dx * c + dy * s;
    const double across = dy * c - dx * s;
    return along >= 0.0 && along <= length && std::abs(across) <= half_width;
  }
};

inline VirtualBox make_box(Complex anchor, double heading, double speed, double delta, int n_tau, double dt) {
  return {anchor, heading, delta, speed * n_tau * dt};
}

// arg of the summed goal offsets, as a principal value in (-pi, pi].
inline double heading_from_goals(std::span<const AgentState> members) {
  Complex resultant{0.0, 0.0};
  for (const auto& a : members) {
    if (!a.goal) throw std::invalid_argument("heading_from_goals: agent " + std::to_string(a.id) + " has no goal");
    resultant += *a.goal - a.position;
  }
  if (std::abs(resultant) <= kAllAtGoalThreshold) {
    throw AllAtGoal("heading_from_goals: goal offsets cancel");
  }
  const double angle = std::atan2(resultant.imag(), resultant.real());
  return angle <= -std::numbers::pi ? std::numbers::pi : angle;
}

// True iff some agent of a foreign cluster lies inside the virtual box of some
// agent, each box oriented along its own cluster's heading. Agents whose
// cluster is not listed own no box.
inline bool zeta_check(std::span<const ClusterSpec> clusters, std::span<const AgentState> agents,
                       double delta, int n_tau, double dt) {
  for (const auto& cluster : clusters) {
    for (const auto& owner : agents) {
      if (owner.cluster != cluster.id) continue;
      const VirtualBox box = make_box(owner.position, cluster.heading, cluster.speed, delta, n_tau, dt);
      for (const auto& other : agents) {
        if (other.cluster == cluster.id) continue;
        if (box.contains(other.position)) return true;
      }
    }
  }
  return false;
}

inline std::vector<ClusterSpec> update_betas(bool zeta, std::span<const ClusterSpec> clusters) {
  std::vector<ClusterSpec> out(clusters.begin(), clusters.end());
  for (auto& c : out) c.beta = zeta ? 1 : 0;
  return out;
}

namespace detail {

inline std::vector<AgentState> members_of(std::span<const AgentState> agents, int cluster) {
  std::vector<AgentState> out;
  for (const auto& a : agents) {
    if (a.cluster == cluster) out.push_back(a);
  }
  return out;
}

inline double goal_distance(const AgentState& a) { return a.goal ? std::abs(*a.goal - a.position) : 0.0; }

}  // namespace detail

// Expected step count for straight-line travel to the farthest goal.
inline int default_step_budget(const ScenarioSpec& spec) {
  const ClusterSpec* cluster = spec.find_cluster(1);
  const double speed = cluster ? cluster->speed : 0.0;
  double farthest = 0.0;
  for (const auto& a : spec.agents) farthest = std::max(farthest, detail::goal_distance(a));
  if (!(speed > 0.0)) return 1;
  return std::max(1, static_cast<int>(std::ceil(10.0 * farthest / (speed * spec.dt))));
}

// Runs until the summed goal residual of the cooperative agents drops to
// |V_1| * epsilon or spec.n_steps steps have been taken. Cooperative agents
// already within epsilon of their goal are held in place.
inline TrajectoryLog tvnc_run(const ScenarioSpec& spec) {
  if (spec.regime != Regime::Tvnc) throw std::invalid_argument("tvnc_run: scenario regime is not TVNC");
  const ClusterSpec* cluster = spec.find_cluster(1);
  if (cluster == nullptr) throw std::invalid_argument("tvnc_run: cluster 1 is not specified");

  std::vector<AgentState> agents = sorted_agents(spec);
  std::map<int, const PresetTrajectory*> paths;
  for (const auto& p : spec.noncoop_trajectories) paths[p.agent_id] = &p;

  const StepParams params{spec.dt, cluster->speed};
  const double tolerance = cluster->goal_tolerance;
  double theta = cluster->heading;

  TrajectoryLog log;
  for (int k = 0;; ++k) {
    const double t = spec.time_at(k);
    std::vector<Singularity> singularities;
    std::vector<AgentState> cooperative;
    for (auto& a : agents) {
      if (a.role == Role::NonCooperative) {
        a.position = paths.at(a.id)->position_at(t);
        singularities.push_back({a.position, spec.radius_of(a)});
      } else {
        cooperative.push_back(a);
      }
    }

    double residual = 0.0;
    for (const auto& a : cooperative) residual += detail::goal_distance(a);
    const bool converged = residual <= static_cast<double>(cooperative.size()) * tolerance;
    const bool stop = converged || k >= spec.n_steps;

    bool heading_defined = true;
    try {
      theta = heading_from_goals(cooperative);
    } catch (const AllAtGoal&) {
      heading_defined = false;
    }
    const FlowField field(theta, 1, std::move(singularities));
    if (field.has_overlapping_disks()) log.warnings.push_back("tick " + std::to_string(k) + ": cylinders overlap");

    TickRecord tick;
    tick.time = t;
    tick.fields.push_back({1, field});
    std::vector<Complex> next(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const AgentState& a = agents[i];
      next[i] = a.position;
      if (a.role == Role::NonCooperative) {
        tick.agents.push_back(detail::passive_record(a));
        continue;
      }
      AgentRecord row = detail::field_record(a, field);
      if (detail::goal_distance(a) <= tolerance) {
        row.flags |= Event::AtGoal;
      } else if (!heading_defined) {
        row.flags |= Event::ClusterHold;
      } else if (!stop) {
        next[i] = detail::step_or_hold(a.position, field, params, row.flags);
      }
      tick.agents.push_back(row);
    }
    if (stop && !converged) {
      for (auto& row : tick.agents) row.flags |= Event::Budget;
    }
    log.ticks.push_back(std::move(tick));
    if (stop) break;
    for (std::size_t i = 0; i < agents.size(); ++i) agents[i].position = next[i];
  }
  return log;
}

// Every tick: headings from goals, one global zeta over all boxes, beta set for
// all clusters alike, then each cluster steps in a field that wraps the foreign
// agents (positions snapshotted at the start of the tick) when beta is 1.
inline TrajectoryLog tvc_run(const ScenarioSpec& spec) {
  if (spec.regime != Regime::Tvc) throw std::invalid_argument("tvc_run: scenario regime is not TVC");

  std::vector<AgentState> agents = sorted_agents(spec);
  std::vector<ClusterSpec> clusters;
  for (const auto& c : spec.clusters) {
    ClusterSpec copy = c;
    copy.members.clear();
    for (const auto& a : agents) {
      if (a.cluster == c.id) copy.members.push_back(a.id);
    }
    if (!copy.members.empty()) clusters.push_back(std::move(copy));
  }
  std::sort(clusters.begin(), clusters.end(), [](const ClusterSpec& a, const ClusterSpec& b) { return a.id < b.id; });
  for (auto& c : clusters) c.beta = 0;

  TrajectoryLog log;
  for (int k = 0; k <= spec.n_steps; ++k) {
    std::map<int, bool> heading_defined;
    for (auto& c : clusters) {
      try {
        c.heading = heading_from_goals(detail::members_of(agents, c.id));
        heading_defined[c.id] = true;
      } catch (const AllAtGoal&) {
        heading_defined[c.id] = false;
      }
    }
    const bool zeta = zeta_check(clusters, agents, spec.delta, spec.n_tau, spec.dt);
    clusters = update_betas(zeta, clusters);

    TickRecord tick;
    tick.time = spec.time_at(k);
    std::map<int, std::size_t> field_index;
    for (const auto& c : clusters) {
      std::vector<Singularity> singularities;
      if (c.beta == 1) {
        for (const auto& a : agents) {
          if (a.cluster != c.id) singularities.push_back({a.position, spec.radius_of(a)});
        }
      }
      field_index[c.id] = tick.fields.size();
      tick.fields.push_back({c.id, FlowField(c.heading, c.beta, std::move(singularities))});
    }

    std::vector<Complex> next(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const AgentState& a = agents[i];
      next[i] = a.position;
      const FlowField& field = tick.fields[field_index.at(a.cluster)].field;
      const ClusterSpec& c = *std::find_if(clusters.begin(), clusters.end(),
                                           [&](const ClusterSpec& x) { return x.id == a.cluster; });
      AgentRecord row = detail::field_record(a, field);
      if (detail::goal_distance(a) <= c.goal_tolerance) {
        row.flags |= Event::AtGoal;
      } else if (!heading_defined[c.id]) {
        row.flags |= Event::ClusterHold;
      } else if (k < spec.n_steps) {
        next[i] = detail::step_or_hold(a.position, field, StepParams{spec.dt, c.speed}, row.flags);
      }
      tick.agents.push_back(row);
    }
    log.ticks.push_back(std::move(tick));
    for (std::size_t i = 0; i < agents.size(); ++i) agents[i].position = next[i];
  }
  return log;
}

}  // namespace fluidnav
