#pragma once

// Healthy/faulty partition and the stationary non-concurrent failure (SNCF)
// controller: healthy agents slide along streamlines of a field that wraps
// every faulty agent in a cylinder frozen at its failure position.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
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

inline constexpr double kDividingStreamlineBand = 1e-6;

struct Partition {
  std::set<int> healthy;
  std::set<int> faulty;
  // Most recent time the failure status changed.
  std::optional<double> last_failure_time;

  bool operator==(const Partition&) const = default;
};

inline Partition initial_partition(std::span<const AgentState> agents) {
  Partition p;
  for (const auto& a : agents) (a.role == Role::Faulty ? p.faulty : p.healthy).insert(a.id);
  return p;
}

// Moves the agent from the healthy to the faulty set. The agent keeps the
// position it has now, which stays fixed from here on.
inline Partition apply_failure(Partition partition, const FailureEvent& event,
                               std::span<AgentState> agents) {
  if (partition.faulty.contains(event.agent_id)) {
    throw AlreadyFaulty("agent " + std::to_string(event.agent_id) + " is already faulty");
  }
  if (!partition.healthy.contains(event.agent_id)) {
    throw UnknownAgent("agent " + std::to_string(event.agent_id) + " is not part of the swarm");
  }
  auto agent = std::find_if(agents.begin(), agents.end(),
                            [&](const AgentState& a) { return a.id == event.agent_id; });
  if (agent == agents.end()) {
    throw UnknownAgent("agent " + std::to_string(event.agent_id) + " has no state");
  }
  partition.healthy.erase(event.agent_id);
  partition.faulty.insert(event.agent_id);
  partition.last_failure_time = event.time;
  agent->role = Role::Faulty;
  agent->cluster = 2;
  return partition;
}

// One cylinder of radius `delta` per faulty agent, in id order.
inline FlowField sncf_field(const Partition& partition, std::span<const AgentState> agents,
                            double theta, double delta) {
  std::vector<Singularity> singularities;
  for (int id : partition.faulty) {
    auto agent = std::find_if(agents.begin(), agents.end(), [&](const AgentState& a) { return a.id == id; });
    if (agent == agents.end()) throw UnknownAgent("faulty agent " + std::to_string(id) + " has no state");
    singularities.push_back({agent->position, delta});
  }
  return FlowField(theta, 1, std::move(singularities));
}

namespace detail {

// True when `z` sits (within the band) on the streamline that runs into the
// upstream stagnation point of `cylinder`, with the cylinder still ahead.
inline bool on_dividing_streamline(Complex z, const Singularity& cylinder, const FlowField& field) {
  const Complex heading = std::conj(field.rotation());
  if (((cylinder.center - z) * field.rotation()).real() <= 0.0) return false;
  try {
    const double psi_dividing = eval(cylinder.center - cylinder.radius * heading, field).psi;
    return std::abs(eval(z, field).psi - psi_dividing) <= kDividingStreamlineBand;
  } catch (const SingularPoint&) {
    return false;
  }
}

}  // namespace detail

inline TrajectoryLog sncf_run(const ScenarioSpec& spec) {
  if (spec.regime != Regime::Sncf) throw std::invalid_argument("sncf_run: scenario regime is not SNCF");
  const ClusterSpec* healthy_cluster = spec.find_cluster(1);
  if (healthy_cluster == nullptr) throw std::invalid_argument("sncf_run: cluster 1 is not specified");

  std::vector<AgentState> agents = sorted_agents(spec);
  std::vector<FailureEvent> failures = spec.failures;
  std::stable_sort(failures.begin(), failures.end(), [&](const FailureEvent& a, const FailureEvent& b) {
    return spec.tick_of(a.time) < spec.tick_of(b.time);
  });

  const double theta = healthy_cluster->heading;
  const StepParams params{spec.dt, healthy_cluster->speed};
  Partition partition = initial_partition(agents);
  FlowField field = sncf_field(partition, agents, theta, spec.delta_h);

  TrajectoryLog log;
  std::size_t next_failure = 0;
  for (int k = 0; k <= spec.n_steps; ++k) {
    std::vector<EventFlags> flags(agents.size(), 0);
    std::vector<double> psi_shift(agents.size(), 0.0);

    std::vector<int> newly_faulty;
    while (next_failure < failures.size() && spec.tick_of(failures[next_failure].time) <= k) {
      const FailureEvent& event = failures[next_failure++];
      partition = apply_failure(std::move(partition), event, agents);
      newly_faulty.push_back(event.agent_id);
    }
    if (!newly_faulty.empty()) {
      field = sncf_field(partition, agents, theta, spec.delta_h);
      if (field.has_overlapping_disks()) {
        log.warnings.push_back("tick " + std::to_string(k) + ": faulty cylinders overlap");
      }
      for (std::size_t i = 0; i < agents.size(); ++i) {
        const AgentState& a = agents[i];
        if (std::find(newly_faulty.begin(), newly_faulty.end(), a.id) != newly_faulty.end()) {
          flags[i] |= Event::Fail;
          flags[i] |= Event::Rebuild;
          continue;
        }
        if (a.role != Role::Cooperative) continue;
        for (int id : newly_faulty) {
          auto frozen = std::find_if(agents.begin(), agents.end(), [&](const AgentState& x) { return x.id == id; });
          const Singularity cylinder{frozen->position, spec.delta_h};
          if (detail::on_dividing_streamline(a.position, cylinder, field)) {
            flags[i] |= Event::Dividing;
            psi_shift[i] = spec.dividing_offset;
          }
        }
      }
    }

    TickRecord tick;
    tick.time = spec.time_at(k);
    tick.fields.push_back({1, field});
    std::vector<Complex> next(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const AgentState& a = agents[i];
      next[i] = a.position;
      if (a.role != Role::Cooperative) {
        AgentRecord row = detail::passive_record(a);
        row.flags |= flags[i];
        tick.agents.push_back(row);
        continue;
      }
      AgentRecord row = detail::field_record(a, field);
      if (k < spec.n_steps) next[i] = detail::step_or_hold(a.position, field, params, flags[i], psi_shift[i]);
      row.flags |= flags[i];
      tick.agents.push_back(row);
    }
    log.ticks.push_back(std::move(tick));
    for (std::size_t i = 0; i < agents.size(); ++i) agents[i].position = next[i];
  }
  return log;
}

}  // namespace fluidnav
