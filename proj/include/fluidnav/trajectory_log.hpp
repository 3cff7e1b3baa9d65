#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluidnav/flow_field.hpp"
#include "fluidnav/scenario.hpp"

namespace fluidnav {

// Per-row event bits. Tick-wide events (Rebuild, Budget) are attached to the
// rows they concern so that a trajectory table carries every event.
enum class Event : std::uint32_t {
  Fail = 1u << 0,        // agent became faulty at this tick
  Rebuild = 1u << 1,     // field rebuilt because the faulty set changed
  Fallback = 1u << 2,    // step from this tick used the rk4 fallback
  Hold = 1u << 3,        // agent could not be stepped and held position
  Stagnation = 1u << 4,  // hold caused by a stagnation point
  AtGoal = 1u << 5,      // agent within goal tolerance, not stepped
  Inside = 1u << 6,      // agent lies inside an active singularity disk
  Dividing = 1u << 7,    // agent on a new cylinder's dividing streamline
  Budget = 1u << 8,      // step budget exhausted before convergence
  ClusterHold = 1u << 9, // cluster goal offsets cancel; heading undefined
};

using EventFlags = std::uint32_t;

constexpr EventFlags operator|(Event a, Event b) noexcept {
  return static_cast<EventFlags>(a) | static_cast<EventFlags>(b);
}
constexpr EventFlags& operator|=(EventFlags& flags, Event e) noexcept {
  return flags |= static_cast<EventFlags>(e);
}
constexpr bool has(EventFlags flags, Event e) noexcept {
  return (flags & static_cast<EventFlags>(e)) != 0;
}

struct EventName {
  Event event;
  std::string_view name;
};

inline constexpr EventName kEventNames[] = {
    {Event::Fail, "fail"},         {Event::Rebuild, "rebuild"},   {Event::Fallback, "fallback"},
    {Event::Hold, "hold"},         {Event::Stagnation, "stagnation"}, {Event::AtGoal, "at_goal"},
    {Event::Inside, "inside"},     {Event::Dividing, "dividing"}, {Event::Budget, "budget"},
    {Event::ClusterHold, "cluster_hold"},
};

inline std::string format_flags(EventFlags flags) {
  std::string out;
  for (const auto& entry : kEventNames) {
    if (!has(flags, entry.event)) continue;
    if (!out.empty()) out += '|';
    out += entry.name;
  }
  return out;
}

inline std::optional<EventFlags> parse_flags(std::string_view text) {
  EventFlags flags = 0;
  while (!text.empty()) {
    const auto bar = text.find('|');
    const std::string_view token = text.substr(0, bar);
    bool known = false;
    for (const auto& entry : kEventNames) {
      if (entry.name == token) {
        flags |= entry.event;
        known = true;
        break;
      }
    }
    if (!known) return std::nullopt;
    if (bar == std::string_view::npos) break;
    text.remove_prefix(bar + 1);
  }
  return flags;
}

struct AgentRecord {
  int id = 0;
  int cluster = 0;
  Complex position;
  Role role = Role::Cooperative;
  // Present for agents of a cluster that runs a flow field at this tick.
  std::optional<PotentialStreamPair> potential;
  std::optional<int> beta;
  std::optional<double> theta;
  EventFlags flags = 0;

  bool operator==(const AgentRecord&) const = default;
};

struct ClusterField {
  int cluster = 0;
  FlowField field;

  bool operator==(const ClusterField&) const = default;
};

struct TickRecord {
  double time = 0.0;
  std::vector<AgentRecord> agents;  // sorted by id
  // Fields in force during this tick; rebuilt from the scenario when a log is read from disk.
  std::vector<ClusterField> fields;

  const FlowField* field_of(int cluster) const noexcept {
    for (const auto& cf : fields) {
      if (cf.cluster == cluster) return &cf.field;
    }
    return nullptr;
  }
};

struct LoggedEvent {
  int tick = 0;
  int agent_id = 0;
  Event event = Event::Fail;
};

struct TrajectoryLog {
  std::vector<TickRecord> ticks;
  std::vector<std::string> warnings;

  std::vector<LoggedEvent> events() const {
    std::vector<LoggedEvent> out;
    for (std::size_t k = 0; k < ticks.size(); ++k) {
      for (const auto& row : ticks[k].agents) {
        for (const auto& entry : kEventNames) {
          if (has(row.flags, entry.event)) out.push_back({static_cast<int>(k), row.id, entry.event});
        }
      }
    }
    return out;
  }

  // Ticks at which the flow field was rebuilt after a change of the faulty set.
  int field_rebuilds() const noexcept {
    int count = 0;
    for (const auto& tick : ticks) {
      for (const auto& row : tick.agents) {
        if (has(row.flags, Event::Rebuild)) {
          ++count;
          break;
        }
      }
    }
    return count;
  }

  bool budget_exhausted() const noexcept {
    if (ticks.empty()) return false;
    for (const auto& row : ticks.back().agents) {
      if (has(row.flags, Event::Budget)) return true;
    }
    return false;
  }

  // Numeric content only; fields are derived data.
  bool same_content(const TrajectoryLog& other) const {
    if (ticks.size() != other.ticks.size()) return false;
    for (std::size_t k = 0; k < ticks.size(); ++k) {
      if (ticks[k].time != other.ticks[k].time || ticks[k].agents != other.ticks[k].agents) return false;
    }
    return true;
  }
};

}  // namespace fluidnav
