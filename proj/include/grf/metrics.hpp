#pragma once

#include <optional>
#include <span>
#include <vector>

#include "grf/model.hpp"

namespace grf {

struct SwarmState {
  long tick = 0;
  std::vector<RobotState> robots;
};

struct MetricSample {
  long tick = 0;
  int cluster_count = 0;
  std::optional<double> mean_intragroup_distance;  // empty when every group is a singleton
  double velocity_consensus_error = 0.0;
  double mean_speed = 0.0;
  /// Shape runs only: [type][attractor] mean distance from the robots of
  /// `type` to each attractor.
  std::vector<std::vector<double>> attractor_distances;
};

/// Connected components of the graph joining same-type robots closer than
/// `threshold` (strict), summed over types.
int cluster_count(std::span<const RobotState> robots, const GroupPartition& partition,
                  double threshold);

/// Mean over groups with >= 2 robots of the mean pairwise distance.
std::optional<double> mean_intragroup_distance(std::span<const RobotState> robots,
                                               const GroupPartition& partition);

/// Mean over non-empty groups of mean |v_i - mean group velocity|.
double velocity_consensus_error(std::span<const RobotState> robots,
                                const GroupPartition& partition);

double mean_speed(std::span<const RobotState> robots);

/// result[type][a] = mean distance from robots of `type` to attractor a.
std::vector<std::vector<double>> attractor_distances(std::span<const RobotState> robots,
                                                     const GroupPartition& partition,
                                                     std::span<const VirtualAttractor> attractors);

MetricSample measure(const SwarmState& state, const SwarmConfig& config);

/// Tick of the first sample that attains the minimum cluster count.
std::optional<long> convergence_iteration(std::span<const MetricSample> samples);

}  // namespace grf
