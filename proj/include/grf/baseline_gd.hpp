#pragma once

// Deterministic contrast controller: plain gradient descent on the same local
// energy the sampler uses, in velocity space.

#include <cmath>

#include "grf/model.hpp"
#include "grf/potential.hpp"

namespace grf {

/// Central-difference gradient of f at x with per-component step h. A
/// component whose difference is not finite is set to zero.
template <class Fn>
Vec2 central_difference_gradient(Fn&& f, const Vec2& x, double h) {
  Vec2 grad = Vec2::Zero();
  for (int k = 0; k < 2; ++k) {
    Vec2 up = x;
    Vec2 down = x;
    up[k] += h;
    down[k] -= h;
    const double slope = (f(up) - f(down)) / (2.0 * h);
    grad[k] = std::isfinite(slope) ? slope : 0.0;
  }
  return grad;
}

/// v - step_size * dH/dv, clamped to the v_max ball. Consumes no randomness.
Vec2 gd_velocity(const LocalView& view, const Vec2& velocity, const EnergyModel& model,
                 const GradientParams& params);

}  // namespace grf
