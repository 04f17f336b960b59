#pragma once

// Energy terms of the local Gibbs potential. Everything here is a pure
// function of its arguments.

#include <limits>
#include <span>
#include <vector>

#include "grf/model.hpp"

namespace grf {

enum class ObservationKind { robot, obstacle_point, attractor };

/// One sensed entity, expressed relative to the observing robot.
struct NeighborObservation {
  Vec2 relative_position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  int type = 0;
  ObservationKind kind = ObservationKind::robot;
};

/// Everything robot i knows when choosing its next velocity.
class LocalView {
 public:
  LocalView() = default;
  LocalView(Vec2 position, int type, double range_limit)
      : position_(std::move(position)), type_(type), range_limit_(range_limit) {}

  /// Throws std::invalid_argument when the observation lies beyond the range
  /// limit; robot and obstacle observations never come from outside it.
  void add(const NeighborObservation& obs);
  void set_attractors(std::span<const VirtualAttractor> attractors) { attractors_ = attractors; }

  const Vec2& position() const { return position_; }
  int type() const { return type_; }
  double range_limit() const { return range_limit_; }
  const std::vector<NeighborObservation>& robots() const { return robots_; }
  const std::vector<NeighborObservation>& obstacles() const { return obstacles_; }
  std::span<const VirtualAttractor> attractors() const { return attractors_; }

 private:
  Vec2 position_ = Vec2::Zero();
  int type_ = 0;
  double range_limit_ = std::numeric_limits<double>::infinity();
  std::vector<NeighborObservation> robots_;
  std::vector<NeighborObservation> obstacles_;
  std::span<const VirtualAttractor> attractors_;
};

/// Parameters shared by every energy evaluation of a run.
struct EnergyModel {
  PotentialParams potential;
  double v_max = 1.0;
  double tick_duration = 0.02;

  static EnergyModel from(const SwarmConfig& config) {
    return {config.potential, config.v_max, config.tick_duration};
  }
};

/// Coulomb-Buckingham (exp-6 plus charge) pair energy at separation r.
/// Throws std::domain_error for r <= 0.
double coulomb_buckingham(double r, double charge_product, const PotentialParams& params);

/// coulomb_buckingham with r floored at params.d_min.
double pair_energy(double r, double charge_product, const PotentialParams& params);

/// Signed charge product of two robot types under params.sign_mode.
double charge_product(int type_i, int type_j, const PotentialParams& params);

/// Always positive: obstacles repel in both sign modes.
double obstacle_charge_product(int type, const PotentialParams& params);

/// Always non-positive: an attractor pulls robots of its target type.
double attractor_charge_product(int type, const VirtualAttractor& attractor,
                                const PotentialParams& params);

Vec2 resultant_relative_velocity(const Vec2& candidate,
                                 std::span<const NeighborObservation> neighbors, int own_type,
                                 KineticMode mode = KineticMode::relative);

inline double kinetic_energy(const Vec2& resultant, double mass) {
  return 0.5 * mass * resultant.squaredNorm();
}

/// 1/2 m (v_max - |v|)^2: zero at full speed.
inline double speed_incentive(const Vec2& candidate, double v_max, double mass) {
  const double deficit = v_max - candidate.norm();
  return 0.5 * mass * deficit * deficit;
}

/// Singleton term: repulsion from sensed obstacle points plus attraction to
/// attractors of the robot's own type, both at the predicted position.
double obstacle_term(const LocalView& view, const Vec2& candidate, const EnergyModel& model);

/// Local energy of robot i moving with `candidate` for one tick.
double hamiltonian(const LocalView& view, const Vec2& candidate, const EnergyModel& model);

}  // namespace grf
