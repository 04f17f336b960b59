#pragma once

// Domain types for a heterogeneous robot swarm: robot state, type partition,
// arena geometry with its discretized obstacle cloud, and the run-wide
// configuration consumed by the simulator and the harness.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace grf {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Raised when a configuration value violates an invariant. Carries every
/// offending key so that a single validation pass reports all of them.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct RobotState {
  int id = 0;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  int type = 0;
};

/// Disjoint, exhaustive assignment of robot ids to groups.
class GroupPartition {
 public:
  GroupPartition() = default;

  /// Robots are numbered contiguously: group 0 owns ids [0, sizes[0]), etc.
  explicit GroupPartition(std::span<const int> group_sizes);

  /// Arbitrary assignment; throws ConfigError if a label is outside
  /// [0, group_count).
  static GroupPartition from_assignment(std::vector<int> assignment, int group_count);

  int group_of(int robot) const { return assignment_.at(static_cast<std::size_t>(robot)); }
  int group_count() const { return static_cast<int>(members_.size()); }
  int robot_count() const { return static_cast<int>(assignment_.size()); }
  int group_size(int group) const {
    return static_cast<int>(members_.at(static_cast<std::size_t>(group)).size());
  }
  const std::vector<int>& members(int group) const {
    return members_.at(static_cast<std::size_t>(group));
  }
  const std::vector<int>& assignment() const { return assignment_; }
  std::vector<int> sizes() const;

 private:
  std::vector<int> assignment_;
  std::vector<std::vector<int>> members_;
};

struct Segment {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
};

/// Samples each segment at `spacing` intervals with both endpoints included.
/// The result is sorted lexicographically and free of exact duplicates, so it
/// does not depend on the order of `segments`.
std::vector<Vec2> build_obstacle_points(std::span<const Segment> segments, double spacing);

struct Arena {
  double width = 0.0;
  double height = 0.0;
  double point_spacing = 0.05;
  bool boundary_walls = false;  // walls[0..4) are the rectangle's sides
  std::vector<Segment> walls;
  std::vector<Vec2> obstacle_points;

  /// Rectangle [0,w]x[0,h]; the boundary walls are added when `boundary_walls`
  /// is set, followed by `interior` segments.
  static Arena box(double w, double h, double spacing, bool boundary_walls = true,
                   std::vector<Segment> interior = {});

  bool contains(const Vec2& p) const {
    return p.x() >= 0.0 && p.x() <= width && p.y() >= 0.0 && p.y() <= height;
  }
  Vec2 clamp(const Vec2& p) const;
};

struct VirtualAttractor {
  Vec2 position = Vec2::Zero();
  int target_type = 0;
  double charge = 1.0;
};

/// Sign convention for the charge product of a robot pair.
///  literal:     positive for same-type pairs (as written in the model).
///  segregating: negative for same-type pairs, so same types attract.
enum class SignMode { literal, segregating };

/// relative: V_i = sum over same-type neighbours of (v_j - candidate).
/// literal:  V_i = sum of v_j (independent of the candidate velocity).
enum class KineticMode { relative, literal };

struct PotentialParams {
  double epsilon = 1.0;
  double r0 = 0.22;
  double alpha = 60.0;
  std::vector<double> charges{1.0};  // one per type; a single entry is broadcast
  double coulomb_coupling = 2.0;
  double mass = 5.0;
  SignMode sign_mode = SignMode::segregating;
  KineticMode kinetic_mode = KineticMode::relative;
  double obstacle_charge = 1.0;
  double d_min = 1e-4;
  bool speed_incentive = true;

  double charge_of(int type) const;
  void validate(int group_count) const;
};

/// Where each Metropolis proposal is centred.
enum class CenterMode { previous_velocity, chain_state };

struct SamplerParams {
  int iterations = 100;
  int burn_in = 50;
  Mat2 proposal_covariance = Mat2::Identity() * 0.0025;
  double temperature = 0.0003;
  CenterMode center_mode = CenterMode::previous_velocity;

  void validate() const;
};

struct GradientParams {
  double step_size = 0.1;
  double fd_step = 1e-3;  // absolute, m/s
};

enum class Truncation { bounded, unbounded };
enum class Controller { grf, gd };

struct SwarmConfig {
  std::string name;
  GroupPartition partition;
  Arena arena;
  std::vector<VirtualAttractor> attractors;
  PotentialParams potential;
  SamplerParams sampler;
  GradientParams gd;
  Controller controller = Controller::grf;

  double v_max = 1.0;
  double tick_duration = 0.02;
  double sensing_radius = 0.5;
  double noise_fraction = 0.0;
  Truncation noise_truncation = Truncation::bounded;
  std::uint64_t rng_seed = 1;
  long max_ticks = 5000;

  double cluster_threshold = 0.3;
  double robot_radius = 0.07;
  long stride = 10;

  double displacement_cap() const { return v_max * tick_duration; }

  /// Throws ConfigError listing every violated invariant.
  void validate() const;
};

/// Holonomic motion model: q + v dt.
inline Vec2 kinematic_step(const Vec2& q, const Vec2& v, double dt) { return q + v * dt; }

std::string to_string(SignMode m);
std::string to_string(KineticMode m);
std::string to_string(CenterMode m);
std::string to_string(Truncation m);
std::string to_string(Controller m);

}  // namespace grf
