#pragma once

#include <cmath>
#include <optional>

#include "fluidnav/flow_field.hpp"
#include "fluidnav/kinematics.hpp"
#include "fluidnav/scenario.hpp"
#include "fluidnav/trajectory_log.hpp"

namespace fluidnav::detail {

// Row for an agent whose cluster runs `field` at this tick.
inline AgentRecord field_record(const AgentState& agent, const FlowField& field) {
  AgentRecord row{agent.id, agent.cluster, agent.position, agent.role, std::nullopt,
                  field.beta(), field.theta(), 0};
  try {
    row.potential = eval(agent.position, field);
  } catch (const SingularPoint&) {
    row.flags |= Event::Inside;
  }
  if (inside_any_disk(agent.position, field)) row.flags |= Event::Inside;
  return row;
}

// Row for an agent that is not driven by a field (faulty, non-cooperative).
inline AgentRecord passive_record(const AgentState& agent) {
  return {agent.id, agent.cluster, agent.position, agent.role, std::nullopt, std::nullopt, std::nullopt, 0};
}

// Advances one agent along the field. Any failure leaves the position unchanged
// and is reported through `flags`; the returned position is always finite.
inline Complex step_or_hold(Complex z, const FlowField& field, const StepParams& params,
                            EventFlags& flags, double psi_shift = 0.0) {
  try {
    const StepResult result = streamline_step(z, field, params, psi_shift);
    if (!std::isfinite(result.position.real()) || !std::isfinite(result.position.imag())) {
      flags |= Event::Hold;
      return z;
    }
    if (result.method == StepMethod::Rk4Fallback) flags |= Event::Fallback;
    return result.position;
  } catch (const StagnationPoint&) {
    flags |= Event::Hold;
    flags |= Event::Stagnation;
  } catch (const InsideCylinder&) {
    flags |= Event::Hold;
    flags |= Event::Inside;
  } catch (const SingularPoint&) {
    flags |= Event::Hold;
    flags |= Event::Inside;
  }
  return z;
}

}  // namespace fluidnav::detail
