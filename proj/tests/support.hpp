#pragma once

// Hand-rolled generators shared by the property tests. Everything is seeded so
// failures reproduce.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fluidnav/fluidnav.hpp"

namespace fluidnav::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Complex point(double half_extent) { return {uniform(-half_extent, half_extent), uniform(-half_extent, half_extent)}; }
  double angle() { return uniform(-std::numbers::pi, std::numbers::pi); }

  // 1..max_singularities non-overlapping disks inside [-3, 3]^2, beta = 1.
  FlowField field(int max_singularities = 4) {
    const int m = integer(1, max_singularities);
    std::vector<Singularity> disks;
    while (static_cast<int>(disks.size()) < m) {
      const Singularity s{point(3.0), uniform(0.2, 0.6)};
      bool clear = true;
      for (const auto& d : disks) clear = clear && std::abs(d.center - s.center) > d.radius + s.radius + 0.1;
      if (clear) disks.push_back(s);
    }
    return FlowField(angle(), 1, std::move(disks));
  }

  // A point at least `margin` outside every disk and away from stagnation.
  Complex exterior(const FlowField& field, double margin = 0.05, double half_extent = 4.0) {
    while (true) {
      const Complex z = point(half_extent);
      if (disk_clearance(z, field) < margin) continue;
      if (std::abs(eval_derivative(z, field)) < 1e-2) continue;
      return z;
    }
  }

 private:
  std::mt19937_64 rng_;
};

// Central finite-difference gradients of phi and psi.
struct Gradients {
  double phi_x, phi_y, psi_x, psi_y;
};

inline Gradients finite_gradients(Complex z, const FlowField& field, double h = 1e-6) {
  const auto px = eval(z + Complex{h, 0}, field);
  const auto mx = eval(z - Complex{h, 0}, field);
  const auto py = eval(z + Complex{0, h}, field);
  const auto my = eval(z - Complex{0, h}, field);
  return {(px.phi - mx.phi) / (2 * h), (py.phi - my.phi) / (2 * h), (px.psi - mx.psi) / (2 * h),
          (py.psi - my.psi) / (2 * h)};
}

// Largest Cauchy-Riemann mismatch, relative to the gradient magnitude.
inline double cauchy_riemann_residual(Complex z, const FlowField& field) {
  const Gradients g = finite_gradients(z, field);
  const double scale = std::max(1.0, std::abs(g.phi_x) + std::abs(g.phi_y) + std::abs(g.psi_x) + std::abs(g.psi_y));
  return std::max(std::abs(g.phi_x - g.psi_y), std::abs(g.phi_y + g.psi_x)) / scale;
}

}  // namespace fluidnav::testing
