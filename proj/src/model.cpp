#include "grf/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

namespace grf {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::ostringstream out;
  out << "invalid configuration:";
  for (const auto& p : problems) out << "\n  " << p;
  return out.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

GroupPartition::GroupPartition(std::span<const int> group_sizes) {
  members_.resize(group_sizes.size());
  int id = 0;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    if (group_sizes[g] < 0) throw ConfigError({"groups: negative group size"});
    for (int k = 0; k < group_sizes[g]; ++k) {
      assignment_.push_back(static_cast<int>(g));
      members_[g].push_back(id++);
    }
  }
}

GroupPartition GroupPartition::from_assignment(std::vector<int> assignment, int group_count) {
  if (group_count < 0) throw ConfigError({"groups: negative group count"});
  GroupPartition p;
  p.members_.resize(static_cast<std::size_t>(group_count));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int g = assignment[i];
    if (g < 0 || g >= group_count) {
      throw ConfigError({"groups: robot " + std::to_string(i) + " has label " +
                         std::to_string(g) + " outside [0, " + std::to_string(group_count) + ")"});
    }
    p.members_[static_cast<std::size_t>(g)].push_back(static_cast<int>(i));
  }
  p.assignment_ = std::move(assignment);
  return p;
}

std::vector<int> GroupPartition::sizes() const {
  std::vector<int> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(static_cast<int>(m.size()));
  return out;
}

std::vector<Vec2> build_obstacle_points(std::span<const Segment> segments, double spacing) {
  if (!(spacing > 0.0)) throw ConfigError({"arena.point_spacing: must be > 0"});
  std::vector<Vec2> points;
  for (const auto& s : segments) {
    const double length = (s.b - s.a).norm();
    const auto n = static_cast<long>(std::ceil(length / spacing - 1e-9));
    if (n <= 0) {
      points.push_back(s.a);
      continue;
    }
    points.push_back(s.a);
    for (long k = 1; k < n; ++k) {
      points.push_back(s.a + (s.b - s.a) * (static_cast<double>(k) / static_cast<double>(n)));
    }
    points.push_back(s.b);
  }
  auto less = [](const Vec2& l, const Vec2& r) {
    return l.x() < r.x() || (l.x() == r.x() && l.y() < r.y());
  };
  std::sort(points.begin(), points.end(), less);
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Vec2& l, const Vec2& r) { return l == r; }),
               points.end());
  return points;
}

Arena Arena::box(double w, double h, double spacing, bool boundary_walls,
                 std::vector<Segment> interior) {
  Arena arena;
  arena.width = w;
  arena.height = h;
  arena.point_spacing = spacing;
  arena.boundary_walls = boundary_walls;
  if (boundary_walls) {
    const Vec2 c00(0.0, 0.0), c10(w, 0.0), c11(w, h), c01(0.0, h);
    arena.walls = {{c00, c10}, {c10, c11}, {c11, c01}, {c01, c00}};
  }
  for (auto& s : interior) arena.walls.push_back(s);
  arena.obstacle_points = build_obstacle_points(arena.walls, spacing);
  return arena;
}

Vec2 Arena::clamp(const Vec2& p) const {
  return {std::clamp(p.x(), 0.0, width), std::clamp(p.y(), 0.0, height)};
}

double PotentialParams::charge_of(int type) const {
  if (charges.size() == 1) return charges.front();
  return charges.at(static_cast<std::size_t>(type));
}

void PotentialParams::validate(int group_count) const {
  std::vector<std::string> problems;
  if (!(epsilon > 0.0)) problems.emplace_back("potential.epsilon: must be > 0");
  if (!(r0 > 0.0)) problems.emplace_back("potential.r0: must be > 0");
  if (!(alpha > 6.0)) problems.emplace_back("potential.alpha: must be > 6");
  if (!(coulomb_coupling >= 0.0)) problems.emplace_back("potential.coulomb_coupling: must be >= 0");
  if (!(mass > 0.0)) problems.emplace_back("potential.mass: must be > 0");
  if (!(obstacle_charge >= 0.0)) problems.emplace_back("potential.obstacle_charge: must be >= 0");
  if (!(d_min > 0.0)) problems.emplace_back("potential.d_min: must be > 0");
  if (charges.empty() ||
      (charges.size() != 1 && static_cast<int>(charges.size()) != group_count)) {
    problems.emplace_back("potential.charges: need one entry or one per group (" +
                          std::to_string(group_count) + ")");
  }
  for (double c : charges) {
    if (!std::isfinite(c)) problems.emplace_back("potential.charges: non-finite entry");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

void SamplerParams::validate() const {
  std::vector<std::string> problems;
  if (iterations < 1) problems.emplace_back("sampler.iterations: must be >= 1");
  if (burn_in < 0 || burn_in >= iterations) {
    problems.emplace_back("sampler.burn_in: must satisfy 0 <= burn_in < iterations");
  }
  if (!(temperature > 0.0)) problems.emplace_back("sampler.temperature: must be > 0");
  const bool symmetric = std::abs(proposal_covariance(0, 1) - proposal_covariance(1, 0)) <=
                         1e-12 * proposal_covariance.cwiseAbs().maxCoeff();
  if (!symmetric || proposal_covariance.llt().info() != Eigen::Success ||
      !proposal_covariance.allFinite()) {
    problems.emplace_back("sampler.proposal_covariance: must be symmetric positive-definite");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

void SwarmConfig::validate() const {
  std::vector<std::string> problems;
  auto collect = [&](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
  };
  collect([&] { potential.validate(partition.group_count()); });
  collect([&] { sampler.validate(); });

  if (partition.group_count() < 1) problems.emplace_back("groups: need at least one group");
  if (!(arena.width > 0.0 && arena.height > 0.0)) {
    problems.emplace_back("arena: width and height must be > 0");
  }
  if (!(v_max > 0.0)) problems.emplace_back("v_max: must be > 0");
  if (!(tick_duration > 0.0)) problems.emplace_back("tick_duration: must be > 0");
  if (!(sensing_radius > 0.0)) problems.emplace_back("sensing_radius: must be > 0");
  if (!(noise_fraction >= 0.0 && noise_fraction < 1.0)) {
    problems.emplace_back("noise.fraction: must be in [0, 1)");
  }
  if (max_ticks < 0) problems.emplace_back("max_ticks: must be >= 0");
  if (stride < 1) problems.emplace_back("stride: must be >= 1");
  if (!(cluster_threshold > 0.0)) problems.emplace_back("cluster_threshold: must be > 0");
  if (!(robot_radius >= 0.0)) problems.emplace_back("robot_radius: must be >= 0");
  if (!(gd.step_size > 0.0)) problems.emplace_back("gd.step_size: must be > 0");
  if (!(gd.fd_step > 0.0)) problems.emplace_back("gd.fd_step: must be > 0");
  for (std::size_t a = 0; a < attractors.size(); ++a) {
    const auto& at = attractors[a];
    if (at.target_type < 0 || at.target_type >= partition.group_count()) {
      problems.emplace_back("attractors[" + std::to_string(a) + "].target_type: unknown type " +
                            std::to_string(at.target_type));
    }
    if (!std::isfinite(at.charge)) {
      problems.emplace_back("attractors[" + std::to_string(a) + "].charge: must be finite");
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::string to_string(SignMode m) { return m == SignMode::literal ? "literal" : "segregating"; }
std::string to_string(KineticMode m) { return m == KineticMode::literal ? "literal" : "relative"; }
std::string to_string(CenterMode m) {
  return m == CenterMode::chain_state ? "chain_state" : "previous_velocity";
}
std::string to_string(Truncation m) { return m == Truncation::bounded ? "bounded" : "unbounded"; }
std::string to_string(Controller m) { return m == Controller::gd ? "gd" : "grf"; }

}  // namespace grf
