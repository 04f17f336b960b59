#include "grf/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace grf {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

int cluster_count(std::span<const RobotState> robots, const GroupPartition& partition,
                  double threshold) {
  const double limit = threshold * threshold;
  DisjointSets sets(robots.size());
  int components = static_cast<int>(robots.size());
  for (std::size_t i = 0; i < robots.size(); ++i) {
    for (std::size_t j = i + 1; j < robots.size(); ++j) {
      if (partition.group_of(robots[i].id) != partition.group_of(robots[j].id)) continue;
      if ((robots[i].position - robots[j].position).squaredNorm() < limit && sets.unite(i, j)) {
        --components;
      }
    }
  }
  return components;
}

std::optional<double> mean_intragroup_distance(std::span<const RobotState> robots,
                                               const GroupPartition& partition) {
  std::vector<std::vector<const RobotState*>> groups(static_cast<std::size_t>(partition.group_count()));
  for (const auto& r : robots) groups[static_cast<std::size_t>(partition.group_of(r.id))].push_back(&r);
  double total = 0.0;
  int counted = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) continue;
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = i + 1; j < g.size(); ++j) sum += (g[i]->position - g[j]->position).norm();
    }
    total += sum / (0.5 * static_cast<double>(g.size()) * static_cast<double>(g.size() - 1));
    ++counted;
  }
  if (counted == 0) return std::nullopt;
  return total / counted;
}

double velocity_consensus_error(std::span<const RobotState> robots,
                                const GroupPartition& partition) {
  const auto groups = static_cast<std::size_t>(partition.group_count());
  std::vector<Vec2> mean(groups, Vec2::Zero());
  std::vector<int> count(groups, 0);
  for (const auto& r : robots) {
    const auto g = static_cast<std::size_t>(partition.group_of(r.id));
    mean[g] += r.velocity;
    ++count[g];
  }
  for (std::size_t g = 0; g < groups; ++g) {
    if (count[g] > 0) mean[g] /= count[g];
  }
  std::vector<double> deviation(groups, 0.0);
  for (const auto& r : robots) {
    const auto g = static_cast<std::size_t>(partition.group_of(r.id));
    deviation[g] += (r.velocity - mean[g]).norm();
  }
  double total = 0.0;
  int nonempty = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    if (count[g] == 0) continue;
    total += deviation[g] / count[g];
    ++nonempty;
  }
  return nonempty == 0 ? 0.0 : total / nonempty;
}

double mean_speed(std::span<const RobotState> robots) {
  if (robots.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : robots) sum += r.velocity.norm();
  return sum / static_cast<double>(robots.size());
}

std::vector<std::vector<double>> attractor_distances(std::span<const RobotState> robots,
                                                     const GroupPartition& partition,
                                                     std::span<const VirtualAttractor> attractors) {
  const auto groups = static_cast<std::size_t>(partition.group_count());
  std::vector<std::vector<double>> out(groups, std::vector<double>(attractors.size(), 0.0));
  std::vector<int> count(groups, 0);
  for (const auto& r : robots) {
    const auto g = static_cast<std::size_t>(partition.group_of(r.id));
    ++count[g];
    for (std::size_t a = 0; a < attractors.size(); ++a) {
      out[g][a] += (r.position - attractors[a].position).norm();
    }
  }
  for (std::size_t g = 0; g < groups; ++g) {
    if (count[g] == 0) continue;
    for (double& d : out[g]) d /= count[g];
  }
  return out;
}

MetricSample measure(const SwarmState& state, const SwarmConfig& config) {
  MetricSample s;
  s.tick = state.tick;
  s.cluster_count = cluster_count(state.robots, config.partition, config.cluster_threshold);
  s.mean_intragroup_distance = mean_intragroup_distance(state.robots, config.partition);
  s.velocity_consensus_error = velocity_consensus_error(state.robots, config.partition);
  s.mean_speed = mean_speed(state.robots);
  if (!config.attractors.empty()) {
    s.attractor_distances = attractor_distances(state.robots, config.partition, config.attractors);
  }
  return s;
}

std::optional<long> convergence_iteration(std::span<const MetricSample> samples) {
  if (samples.empty()) return std::nullopt;
  const auto best = std::min_element(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
    return a.cluster_count < b.cluster_count;
  });
  return best->tick;
}

}  // namespace grf
