#pragma once

// Scenario description shared by the three navigation regimes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fluidnav/errors.hpp"
#include "fluidnav/flow_field.hpp"

namespace fluidnav {

enum class Role { Cooperative, Faulty, NonCooperative };

inline const char* to_string(Role role) noexcept {
  switch (role) {
    case Role::Cooperative: return "cooperative";
    case Role::Faulty: return "faulty";
    case Role::NonCooperative: return "noncooperative";
  }
  return "?";
}

inline std::optional<Role> role_from_string(std::string_view text) noexcept {
  if (text == "cooperative") return Role::Cooperative;
  if (text == "faulty") return Role::Faulty;
  if (text == "noncooperative") return Role::NonCooperative;
  return std::nullopt;
}

struct AgentState {
  int id = 0;
  int cluster = 1;
  Complex position;
  Role role = Role::Cooperative;
  std::optional<Complex> goal;
  // Exclusion radius when this agent is a singularity; falls back to the scenario's delta_h.
  std::optional<double> radius;

  bool operator==(const AgentState&) const = default;
};

struct ClusterSpec {
  int id = 1;
  std::vector<int> members;
  double speed = 0.3;           // v_l, m/s
  int beta = 0;                 // runtime activation flag
  double heading = 0.0;         // theta_l, rad; fixed for the whole run under SNCF
  double goal_tolerance = 0.05; // epsilon, m

  bool operator==(const ClusterSpec&) const = default;
};

struct FailureEvent {
  double time = 0.0;
  int agent_id = 0;

  bool operator==(const FailureEvent&) const = default;
};

struct Waypoint {
  double time = 0.0;
  Complex position;

  bool operator==(const Waypoint&) const = default;
};

// Predefined path of a non-cooperative agent: piecewise linear between
// waypoints, held at the end points outside their time span.
struct PresetTrajectory {
  int agent_id = 0;
  std::vector<Waypoint> waypoints;

  Complex position_at(double t) const {
    if (waypoints.empty()) throw std::logic_error("PresetTrajectory: no waypoints");
    if (t <= waypoints.front().time) return waypoints.front().position;
    if (t >= waypoints.back().time) return waypoints.back().position;
    auto upper = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                                  [](double value, const Waypoint& w) { return value < w.time; });
    const Waypoint& b = *upper;
    const Waypoint& a = *(upper - 1);
    const double s = (t - a.time) / (b.time - a.time);
    return a.position + s * (b.position - a.position);
  }

  bool operator==(const PresetTrajectory&) const = default;
};

enum class Regime { Sncf, Tvnc, Tvc };

inline const char* to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Sncf: return "SNCF";
    case Regime::Tvnc: return "TVNC";
    case Regime::Tvc: return "TVC";
  }
  return "?";
}

inline std::optional<Regime> regime_from_string(std::string_view text) noexcept {
  if (text == "SNCF") return Regime::Sncf;
  if (text == "TVNC") return Regime::Tvnc;
  if (text == "TVC") return Regime::Tvc;
  return std::nullopt;
}

struct ScenarioSpec {
  int version = 1;
  Regime regime = Regime::Sncf;
  double t0 = 0.0;
  double dt = 0.1;
  // Tick count for SNCF/TVC; step budget for TVNC.
  int n_steps = 1;
  std::vector<AgentState> agents;
  std::vector<ClusterSpec> clusters;
  std::vector<FailureEvent> failures;
  std::vector<PresetTrajectory> noncoop_trajectories;
  double delta_h = 0.4;
  double delta = 0.15;
  int n_tau = 3;
  double epsilon = 0.05;
  // Minimum admissible distance between agents, used by the audit.
  double safety_radius = 0.1;
  // psi shift for an agent sitting on a new cylinder's dividing streamline; 0 only flags it.
  double dividing_offset = 1e-4;

  double time_at(int tick) const noexcept { return t0 + tick * dt; }

  // Failure times snap to the nearest tick of the uniform grid.
  int tick_of(double time) const noexcept {
    return static_cast<int>(std::lround((time - t0) / dt));
  }

  const ClusterSpec* find_cluster(int id) const noexcept {
    for (const auto& c : clusters) {
      if (c.id == id) return &c;
    }
    return nullptr;
  }

  const AgentState* find_agent(int id) const noexcept {
    for (const auto& a : agents) {
      if (a.id == id) return &a;
    }
    return nullptr;
  }

  double radius_of(const AgentState& agent) const noexcept {
    return agent.radius.value_or(delta_h);
  }

  bool operator==(const ScenarioSpec&) const = default;
};

namespace detail {

inline bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline void check_fields(const ScenarioSpec& spec, std::vector<std::string>& out) {
  if (spec.version != 1) out.push_back("version: unsupported schema version " + std::to_string(spec.version));
  if (!std::isfinite(spec.t0)) out.push_back("t0: must be finite");
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) out.push_back("dt: must be positive");
  if (spec.n_steps < 1) out.push_back("n_steps: must be at least 1");
  if (!(spec.delta_h > 0.0)) out.push_back("delta_h: must be positive");
  if (!(spec.delta > 0.0)) out.push_back("delta: must be positive");
  if (spec.n_tau < 1) out.push_back("n_tau: must be at least 1");
  if (!(spec.epsilon > 0.0)) out.push_back("epsilon: must be positive");
  if (!(spec.safety_radius >= 0.0)) out.push_back("safety_radius: must be non-negative");
  if (!(spec.dividing_offset >= 0.0) || !std::isfinite(spec.dividing_offset)) {
    out.push_back("dividing_offset: must be a finite non-negative number");
  }

  if (spec.agents.empty()) out.push_back("agents: at least one agent is required");
  std::set<int> ids;
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    const auto& a = spec.agents[i];
    const std::string where = "agents[" + std::to_string(i) + "]";
    if (a.id < 1) out.push_back(where + ".id: must be a positive integer");
    if (!ids.insert(a.id).second) out.push_back(where + ".id: duplicate agent id " + std::to_string(a.id));
    if (a.cluster < 1) out.push_back(where + ".cluster: must be a positive integer");
    if (!finite(a.position)) out.push_back(where + ".position: must be finite");
    if (a.goal && !finite(*a.goal)) out.push_back(where + ".goal: must be finite");
    if (a.radius && !(*a.radius > 0.0)) out.push_back(where + ".radius: must be positive");
  }

  std::set<int> cluster_ids;
  for (std::size_t i = 0; i < spec.clusters.size(); ++i) {
    const auto& c = spec.clusters[i];
    const std::string where = "clusters[" + std::to_string(i) + "]";
    if (c.id < 1) out.push_back(where + ".id: must be a positive integer");
    if (!cluster_ids.insert(c.id).second) out.push_back(where + ".id: duplicate cluster id");
    if (!(c.speed >= 0.0) || !std::isfinite(c.speed)) out.push_back(where + ".speed: must be non-negative");
    if (!std::isfinite(c.heading)) out.push_back(where + ".heading: must be finite");
    if (!(c.goal_tolerance > 0.0)) out.push_back(where + ".goal_tolerance: must be positive");
    if (c.beta != 0 && c.beta != 1) out.push_back(where + ".beta: must be 0 or 1");
  }

  std::set<int> failed;
  for (std::size_t i = 0; i < spec.failures.size(); ++i) {
    const auto& f = spec.failures[i];
    const std::string where = "failures[" + std::to_string(i) + "]";
    if (!std::isfinite(f.time) || f.time < spec.t0) out.push_back(where + ".time: must be >= t0");
    const AgentState* agent = spec.find_agent(f.agent_id);
    if (agent == nullptr) {
      out.push_back(where + ".agent: unknown agent " + std::to_string(f.agent_id));
    } else if (agent->role != Role::Cooperative || !failed.insert(f.agent_id).second) {
      out.push_back(where + ".agent: agent " + std::to_string(f.agent_id) + " is already faulty");
    }
  }

  std::set<int> with_paths;
  for (std::size_t i = 0; i < spec.noncoop_trajectories.size(); ++i) {
    const auto& p = spec.noncoop_trajectories[i];
    const std::string where = "noncoop_trajectories[" + std::to_string(i) + "]";
    const AgentState* agent = spec.find_agent(p.agent_id);
    if (agent == nullptr || agent->role != Role::NonCooperative) {
      out.push_back(where + ".agent: " + std::to_string(p.agent_id) + " is not a non-cooperative agent");
    }
    if (!with_paths.insert(p.agent_id).second) out.push_back(where + ".agent: duplicate trajectory");
    if (p.waypoints.empty()) out.push_back(where + ".waypoints: at least one waypoint is required");
    for (std::size_t k = 0; k < p.waypoints.size(); ++k) {
      if (!std::isfinite(p.waypoints[k].time) || !finite(p.waypoints[k].position)) {
        out.push_back(where + ".waypoints[" + std::to_string(k) + "]: must be finite");
      }
      if (k > 0 && !(p.waypoints[k].time > p.waypoints[k - 1].time)) {
        out.push_back(where + ".waypoints[" + std::to_string(k) + "].time: must be strictly increasing");
      }
    }
  }
}

inline void check_regime(const ScenarioSpec& spec, std::vector<std::string>& out) {
  std::set<int> agent_clusters;
  for (const auto& a : spec.agents) agent_clusters.insert(a.cluster);

  auto require_cluster_spec = [&](int id) {
    if (spec.find_cluster(id) == nullptr) {
      out.push_back("clusters: cluster " + std::to_string(id) + " has moving agents but no entry");
    }
  };

  switch (spec.regime) {
    case Regime::Sncf: {
      bool any_healthy = false;
      for (const auto& a : spec.agents) {
        if (a.role == Role::NonCooperative) {
          out.push_back("SNCF: agent " + std::to_string(a.id) + " is non-cooperative; SNCF only has healthy and faulty agents");
        } else if (a.role == Role::Cooperative) {
          any_healthy = true;
          if (a.cluster != 1) out.push_back("SNCF: healthy agent " + std::to_string(a.id) + " must start in cluster 1 (m=2)");
        } else if (a.cluster != 2) {
          out.push_back("SNCF: faulty agent " + std::to_string(a.id) + " must be in cluster 2 (m=2)");
        }
      }
      if (!any_healthy) out.push_back("SNCF: at least one healthy agent is required");
      if (!spec.noncoop_trajectories.empty()) out.push_back("SNCF: noncoop_trajectories only apply to TVNC");
      require_cluster_spec(1);
      break;
    }
    case Regime::Tvnc: {
      bool any_coop = false;
      bool any_noncoop = false;
      for (const auto& a : spec.agents) {
        if (a.role == Role::Faulty) {
          out.push_back("TVNC: agent " + std::to_string(a.id) + " is faulty; the TVNC partition is time-invariant");
        } else if (a.role == Role::Cooperative) {
          any_coop = true;
          if (a.cluster != 1) out.push_back("TVNC: cooperative agent " + std::to_string(a.id) + " must be in cluster 1 (m=2)");
          if (!a.goal) out.push_back("TVNC: cooperative agent " + std::to_string(a.id) + " needs a goal");
        } else {
          any_noncoop = true;
          if (a.cluster != 2) out.push_back("TVNC: non-cooperative agent " + std::to_string(a.id) + " must be in cluster 2 (m=2)");
        }
      }
      if (!any_coop) out.push_back("TVNC: at least one cooperative agent is required");
      if (!any_noncoop) out.push_back("TVNC: at least one non-cooperative agent is required (m=2)");
      if (!spec.failures.empty()) out.push_back("TVNC: failures only apply to SNCF; the partition is time-invariant");
      for (const auto& a : spec.agents) {
        if (a.role != Role::NonCooperative) continue;
        const bool has_path = std::any_of(spec.noncoop_trajectories.begin(), spec.noncoop_trajectories.end(),
                                          [&](const PresetTrajectory& p) { return p.agent_id == a.id; });
        if (!has_path) out.push_back("TVNC: non-cooperative agent " + std::to_string(a.id) + " has no predefined trajectory");
      }
      require_cluster_spec(1);
      break;
    }
    case Regime::Tvc: {
      if (agent_clusters.size() < 2) {
        out.push_back("TVC: requires m>1 clusters, found " + std::to_string(agent_clusters.size()));
      }
      for (const auto& a : spec.agents) {
        if (a.role != Role::Cooperative) {
          out.push_back("TVC: agent " + std::to_string(a.id) + " must be cooperative");
        }
        if (!a.goal) out.push_back("TVC: agent " + std::to_string(a.id) + " needs a goal");
      }
      if (!spec.failures.empty()) out.push_back("TVC: failures only apply to SNCF");
      if (!spec.noncoop_trajectories.empty()) out.push_back("TVC: noncoop_trajectories only apply to TVNC");
      for (int id : agent_clusters) require_cluster_spec(id);
      break;
    }
  }
}

}  // namespace detail

// Throws RegimeError when a regime rule is broken, otherwise SchemaError when
// any field is out of range. Both carry one diagnostic per problem.
inline void validate_spec(const ScenarioSpec& spec) {
  std::vector<std::string> regime_issues;
  detail::check_regime(spec, regime_issues);
  if (!regime_issues.empty()) throw RegimeError(std::move(regime_issues));
  std::vector<std::string> field_issues;
  detail::check_fields(spec, field_issues);
  if (!field_issues.empty()) throw SchemaError(std::move(field_issues));
}

// Agents sorted by id; every per-tick list in the engine follows this order.
inline std::vector<AgentState> sorted_agents(const ScenarioSpec& spec) {
  std::vector<AgentState> agents = spec.agents;
  std::sort(agents.begin(), agents.end(), [](const AgentState& a, const AgentState& b) { return a.id < b.id; });
  return agents;
}

}  // namespace fluidnav
