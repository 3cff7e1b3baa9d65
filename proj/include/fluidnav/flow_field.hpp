#pragma once

// Complex potential of a uniform stream past superposed doublets.
//
// With w = z e^{-j theta} the field is
//
//   f(z) = (1 - beta) w + beta * sum_h [ (w - c_h) + r_h^2 / (w - c_h) ],
//
// where c_h = z_h e^{-j theta} is the singularity center expressed in the
// rotated frame. `Singularity::center` always holds the physical position z_h,
// so each disk of radius r_h sits where the excluded agent actually is,
// whatever the heading.

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fluidnav/errors.hpp"

namespace fluidnav {

using Complex = std::complex<double>;

inline constexpr double kSingularTolerance = 1e-9;
inline constexpr double kDiskSlack = 1e-12;
inline constexpr double kInversionTolerance = 1e-10;
inline constexpr int kMaxNewtonIterations = 100;
inline constexpr int kMaxStepHalvings = 8;
inline constexpr double kRestartOffset = 1e-3;
inline constexpr double kStagnationThreshold = 1e-10;

struct Singularity {
  Complex center;
  double radius = 0.0;

  bool operator==(const Singularity&) const = default;
};

struct PotentialStreamPair {
  double phi = 0.0;
  double psi = 0.0;

  Complex as_complex() const noexcept { return {phi, psi}; }
  bool operator==(const PotentialStreamPair&) const = default;
};

class FlowField {
 public:
  // Identity flow: f(z) = z.
  FlowField() = default;

  FlowField(double theta, int beta, std::vector<Singularity> singularities)
      : theta_(theta),
        beta_(beta),
        singularities_(std::move(singularities)),
        rotation_(std::polar(1.0, -theta)) {
    if (beta != 0 && beta != 1) {
      throw std::invalid_argument("FlowField: beta must be 0 or 1, got " + std::to_string(beta));
    }
    if (!std::isfinite(theta)) throw std::invalid_argument("FlowField: heading must be finite");
    for (const auto& s : singularities_) {
      if (!(s.radius > 0.0) || !std::isfinite(s.radius)) {
        throw std::invalid_argument("FlowField: singularity radius must be positive");
      }
      if (!std::isfinite(s.center.real()) || !std::isfinite(s.center.imag())) {
        throw std::invalid_argument("FlowField: singularity center must be finite");
      }
    }
  }

  double theta() const noexcept { return theta_; }
  int beta() const noexcept { return beta_; }

  // beta = 1 with no singularities would make f identically zero; such a field
  // behaves as the identity flow instead.
  int effective_beta() const noexcept { return singularities_.empty() ? 0 : beta_; }

  std::span<const Singularity> singularities() const noexcept { return singularities_; }

  // e^{-j theta}
  Complex rotation() const noexcept { return rotation_; }

  // Disks only shape the flow when the doublet terms are switched on.
  std::span<const Singularity> active_singularities() const noexcept {
    if (effective_beta() == 0) return {};
    return singularities_;
  }

  bool has_overlapping_disks() const noexcept {
    for (std::size_t a = 0; a < singularities_.size(); ++a) {
      for (std::size_t b = a + 1; b < singularities_.size(); ++b) {
        const auto& s = singularities_[a];
        const auto& t = singularities_[b];
        if (std::abs(s.center - t.center) < s.radius + t.radius) return true;
      }
    }
    return false;
  }

  bool operator==(const FlowField& other) const noexcept {
    return theta_ == other.theta_ && beta_ == other.beta_ &&
           singularities_ == other.singularities_;
  }

 private:
  double theta_ = 0.0;
  int beta_ = 0;
  std::vector<Singularity> singularities_;
  Complex rotation_{1.0, 0.0};
};

// True when z lies strictly inside an active disk (boundary counts as outside).
inline bool inside_any_disk(Complex z, const FlowField& field) noexcept {
  for (const auto& s : field.active_singularities()) {
    if (std::abs(z - s.center) < s.radius - kDiskSlack) return true;
  }
  return false;
}

// Smallest |z - z_h| - r_h over active singularities; +inf when there are none.
inline double disk_clearance(Complex z, const FlowField& field) noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : field.active_singularities()) {
    best = std::min(best, std::abs(z - s.center) - s.radius);
  }
  return best;
}

namespace detail {

inline void check_not_singular(Complex z, const Singularity& s) {
  if (std::abs(z - s.center) <= kSingularTolerance) {
    throw SingularPoint("point coincides with singularity at (" +
                        std::to_string(s.center.real()) + ", " +
                        std::to_string(s.center.imag()) + ")");
  }
}

inline Complex eval_complex(Complex z, const FlowField& field) {
  const Complex rot = field.rotation();
  if (field.effective_beta() == 0) return z * rot;
  Complex sum{0.0, 0.0};
  for (const auto& s : field.singularities()) {
    check_not_singular(z, s);
    const Complex d = (z - s.center) * rot;
    sum += d + s.radius * s.radius / d;
  }
  return sum;
}

// Sum of term magnitudes; bounds the rounding error of eval_complex.
inline double eval_scale(Complex z, const FlowField& field) {
  const Complex rot = field.rotation();
  if (field.effective_beta() == 0) return std::abs(z);
  double scale = 0.0;
  for (const auto& s : field.singularities()) {
    const Complex d = (z - s.center) * rot;
    scale += std::abs(d) + s.radius * s.radius / std::abs(d);
  }
  return scale;
}

}  // namespace detail

inline PotentialStreamPair eval(Complex z, const FlowField& field) {
  const Complex f = detail::eval_complex(z, field);
  return {f.real(), f.imag()};
}

struct FieldSample {
  PotentialStreamPair value;
  bool inside_cylinder = false;
};

// eval plus the inside-disk flag, so callers can reject interior points.
inline FieldSample sample(Complex z, const FlowField& field) {
  return {eval(z, field), inside_any_disk(z, field)};
}

inline Complex eval_derivative(Complex z, const FlowField& field) {
  const Complex rot = field.rotation();
  if (field.effective_beta() == 0) return rot;
  Complex sum{0.0, 0.0};
  for (const auto& s : field.singularities()) {
    detail::check_not_singular(z, s);
    const Complex d = (z - s.center) * rot;
    sum += 1.0 - s.radius * s.radius / (d * d);
  }
  return rot * sum;
}

// Solves eval(z) = target for z by damped Newton iteration from `guess`.
//
// Full steps are halved up to kMaxStepHalvings times until the residual
// decreases and the candidate stays outside every disk. When no candidate is
// acceptable the iteration restarts from the guess nudged along the local
// tangent, alternating sides with growing offsets.
inline Complex invert(PotentialStreamPair target, const FlowField& field, Complex guess) {
  if (inside_any_disk(guess, field)) {
    throw InsideCylinder("invert: initial guess lies inside a singularity disk");
  }
  const Complex goal = target.as_complex();

  auto residual_at = [&](Complex z, double& residual) {
    try {
      residual = std::abs(detail::eval_complex(z, field) - goal);
      return std::isfinite(residual);
    } catch (const SingularPoint&) {
      return false;
    }
  };
  auto tolerance_at = [&](Complex z) {
    // Far from the origin the absolute tolerance can drop below rounding noise.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                         (detail::eval_scale(z, field) + std::abs(goal));
    return std::max(kInversionTolerance, floor);
  };

  Complex restart_direction{0.0, 0.0};
  try {
    const Complex d = eval_derivative(guess, field);
    if (std::abs(d) > kStagnationThreshold) restart_direction = std::conj(d) / std::abs(d);
  } catch (const SingularPoint&) {
  }
  if (restart_direction == Complex{0.0, 0.0}) restart_direction = std::conj(field.rotation());

  bool interior_root_seen = false;
  int restarts = 0;
  Complex z = guess;
  double residual = 0.0;
  if (!residual_at(z, residual)) throw SingularPoint("invert: guess coincides with a singularity");

  for (int iteration = 0; iteration < kMaxNewtonIterations; ++iteration) {
    if (residual <= tolerance_at(z)) {
      // Polish: a couple of extra steps take the residual to rounding level,
      // which keeps the position error small near slow (stagnation) regions.
      for (int polish = 0; polish < 3; ++polish) {
        const Complex d = eval_derivative(z, field);
        if (std::abs(d) <= kStagnationThreshold) break;
        const Complex candidate = z - (detail::eval_complex(z, field) - goal) / d;
        double r = 0.0;
        if (inside_any_disk(candidate, field) || !residual_at(candidate, r) || !(r < residual)) break;
        z = candidate;
        residual = r;
      }
      return z;
    }

    bool accepted = false;
    const Complex d = eval_derivative(z, field);
    if (std::abs(d) > kStagnationThreshold) {
      const Complex step = -(detail::eval_complex(z, field) - goal) / d;
      double lambda = 1.0;
      for (int halving = 0; halving <= kMaxStepHalvings; ++halving, lambda *= 0.5) {
        const Complex candidate = z + lambda * step;
        double r = 0.0;
        if (!residual_at(candidate, r)) continue;
        if (inside_any_disk(candidate, field)) {
          if (r <= kInversionTolerance) interior_root_seen = true;
          continue;
        }
        if (r < residual) {
          z = candidate;
          residual = r;
          accepted = true;
          break;
        }
      }
    }
    if (accepted) continue;

    ++restarts;
    const double offset = kRestartOffset * ((restarts + 1) / 2);
    const Complex nudged = guess + (restarts % 2 == 1 ? offset : -offset) * restart_direction;
    if (restarts > 8 || inside_any_disk(nudged, field) || !residual_at(nudged, residual)) break;
    z = nudged;
  }

  if (interior_root_seen) {
    throw RootInsideCylinder("invert: the only root reached lies inside a singularity disk");
  }
  throw NoConvergence("invert: Newton iteration did not converge");
}

}  // namespace fluidnav
