#include "grf/baseline_gd.hpp"

namespace grf {

Vec2 gd_velocity(const LocalView& view, const Vec2& velocity, const EnergyModel& model,
                 const GradientParams& params) {
  const Vec2 grad = central_difference_gradient(
      [&](const Vec2& v) { return hamiltonian(view, v, model); }, velocity, params.fd_step);
  Vec2 next = velocity - params.step_size * grad;
  const double speed = next.norm();
  if (speed > model.v_max) next *= model.v_max / speed;
  return next;
}

}  // namespace grf
