#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "fluidnav/errors.hpp"
#include "fluidnav/flow_field.hpp"

namespace fluidnav {

struct StepParams {
  double dt = 0.1;     // s
  double speed = 0.0;  // m/s

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("StepParams: dt must be positive");
    if (!(speed >= 0.0)) throw std::invalid_argument("StepParams: speed must be non-negative");
  }
};

// Unit direction of the local streamline, (dpsi/dy, -dpsi/dx) normalized, as a
// complex number x + jy.
struct TangentVector {
  Complex direction;
  double raw_gradient_norm = 0.0;
};

// conj(f'(z)) is the streamline vector (dpsi/dy, -dpsi/dx); its modulus is |f'|.
inline TangentVector tangent(Complex z, const FlowField& field) {
  const Complex u = std::conj(eval_derivative(z, field));
  const double norm = std::abs(u);
  if (!(norm > kStagnationThreshold)) {
    throw StagnationPoint("tangent: flow speed vanishes at the query point");
  }
  return {u / norm, norm};
}

inline Complex desired_velocity(Complex z, const FlowField& field, double speed) {
  if (speed == 0.0) return {0.0, 0.0};
  return speed * tangent(z, field).direction;
}

namespace detail {

// dz/dt = v u / |u|^2 with u = conj(f'): advances phi at rate v and keeps psi fixed.
inline Complex potential_rate_velocity(Complex z, const FlowField& field, double speed) {
  const Complex u = std::conj(eval_derivative(z, field));
  const double norm2 = std::norm(u);
  if (!(std::sqrt(norm2) > kStagnationThreshold)) {
    throw StagnationPoint("rk4_step: flow speed vanishes along the step");
  }
  return speed * u / norm2;
}

}  // namespace detail

// Classical fourth-order Runge-Kutta step of dz/dt = v u / |u|^2.
inline Complex rk4_step(Complex z, const FlowField& field, const StepParams& params) {
  params.validate();
  if (params.speed == 0.0) return z;
  const double h = params.dt;
  const double v = params.speed;
  const Complex k1 = detail::potential_rate_velocity(z, field, v);
  const Complex k2 = detail::potential_rate_velocity(z + 0.5 * h * k1, field, v);
  const Complex k3 = detail::potential_rate_velocity(z + 0.5 * h * k2, field, v);
  const Complex k4 = detail::potential_rate_velocity(z + h * k3, field, v);
  return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

enum class StepMethod { Inversion, Rk4Fallback };

struct StepResult {
  Complex position;
  StepMethod method = StepMethod::Inversion;
};

// One streamline-sliding update: phi advances by v dt, psi is held (shifted by
// psi_shift when nonzero) and the position is recovered by inverting the field
// from the current position. Falls back to a single rk4_step when the inversion
// fails; a StagnationPoint from the fallback propagates.
inline StepResult streamline_step(Complex z, const FlowField& field, const StepParams& params,
                                  double psi_shift = 0.0) {
  params.validate();
  if (params.speed == 0.0 && psi_shift == 0.0) return {z, StepMethod::Inversion};
  if (inside_any_disk(z, field)) {
    throw InsideCylinder("streamline_step: agent lies inside a singularity disk");
  }
  const PotentialStreamPair now = eval(z, field);
  const PotentialStreamPair target{now.phi + params.speed * params.dt, now.psi + psi_shift};
  try {
    return {invert(target, field, z), StepMethod::Inversion};
  } catch (const NoConvergence&) {
  } catch (const RootInsideCylinder&) {
  }
  return {rk4_step(z, field, params), StepMethod::Rk4Fallback};
}

}  // namespace fluidnav
