#include "grf/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace grf {

void LocalView::add(const NeighborObservation& obs) {
  if (obs.kind == ObservationKind::attractor) {
    throw std::invalid_argument("attractors are supplied through set_attractors");
  }
  if (obs.relative_position.norm() > range_limit_) {
    throw std::invalid_argument("observation outside the sensing range");
  }
  if (obs.kind == ObservationKind::robot) {
    robots_.push_back(obs);
  } else {
    obstacles_.push_back(obs);
  }
}

double coulomb_buckingham(double r, double charge_product, const PotentialParams& params) {
  if (!(r > 0.0)) throw std::domain_error("coulomb_buckingham: r must be > 0");
  const double a = params.alpha;
  const double ratio = params.r0 / r;
  const double ratio3 = ratio * ratio * ratio;
  const double repulsive = 6.0 / (a - 6.0) * std::exp(a * (1.0 - r / params.r0));
  const double dispersive = a / (a - 6.0) * ratio3 * ratio3;
  return params.epsilon * (repulsive - dispersive) + params.coulomb_coupling * charge_product / r;
}

double pair_energy(double r, double charge_product, const PotentialParams& params) {
  return coulomb_buckingham(r < params.d_min ? params.d_min : r, charge_product, params);
}

double charge_product(int type_i, int type_j, const PotentialParams& params) {
  const double magnitude = std::abs(params.charge_of(type_i) * params.charge_of(type_j));
  const double literal = type_i == type_j ? magnitude : -magnitude;
  return params.sign_mode == SignMode::literal ? literal : -literal;
}

double obstacle_charge_product(int type, const PotentialParams& params) {
  return std::abs(params.obstacle_charge * params.charge_of(type));
}

double attractor_charge_product(int type, const VirtualAttractor& attractor,
                                const PotentialParams& params) {
  return -std::abs(attractor.charge * params.charge_of(type));
}

Vec2 resultant_relative_velocity(const Vec2& candidate,
                                 std::span<const NeighborObservation> neighbors, int own_type,
                                 KineticMode mode) {
  Vec2 sum = Vec2::Zero();
  for (const auto& n : neighbors) {
    if (n.kind != ObservationKind::robot || n.type != own_type) continue;
    sum += mode == KineticMode::relative ? Vec2(n.velocity - candidate) : n.velocity;
  }
  return sum;
}

double obstacle_term(const LocalView& view, const Vec2& candidate, const EnergyModel& model) {
  const auto& p = model.potential;
  const Vec2 shift = candidate * model.tick_duration;
  double energy = 0.0;
  if (!view.obstacles().empty()) {
    const double c_obs = obstacle_charge_product(view.type(), p);
    for (const auto& o : view.obstacles()) {
      energy += pair_energy((o.relative_position - shift).norm(), c_obs, p);
    }
  }
  const Vec2 predicted = kinematic_step(view.position(), candidate, model.tick_duration);
  for (const auto& at : view.attractors()) {
    if (at.target_type != view.type()) continue;
    energy += pair_energy((at.position - predicted).norm(),
                          attractor_charge_product(view.type(), at, p), p);
  }
  return energy;
}

double hamiltonian(const LocalView& view, const Vec2& candidate, const EnergyModel& model) {
  const auto& p = model.potential;
  const double dt = model.tick_duration;
  const Vec2 shift = candidate * dt;

  double energy = obstacle_term(view, candidate, model);
  for (const auto& n : view.robots()) {
    // Both robots are advanced one tick; the neighbour keeps its observed velocity.
    const Vec2 separation = n.relative_position + n.velocity * dt - shift;
    energy += pair_energy(separation.norm(), charge_product(view.type(), n.type, p), p);
  }
  energy += kinetic_energy(
      resultant_relative_velocity(candidate, view.robots(), view.type(), p.kinetic_mode), p.mass);
  if (p.speed_incentive) energy += speed_incentive(candidate, model.v_max, p.mass);
  return energy;
}

}  // namespace grf
