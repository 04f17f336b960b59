#pragma once

#include <cmath>
#include <vector>

#include "grf/metrics.hpp"
#include "grf/model.hpp"
#include "grf/rng.hpp"

namespace grf::testing {

/// Open arena without walls, contiguous groups.
inline SwarmConfig open_config(std::vector<int> sizes, double side = 20.0) {
  SwarmConfig c;
  c.name = "test";
  c.partition = GroupPartition(sizes);
  c.arena = Arena::box(side, side, 0.05, false);
  return c;
}

inline bool close(double a, double b, double rel = 1e-12) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

/// n robots of `groups` types scattered uniformly in a side x side square.
inline SwarmState random_state(RandomStream& rng, int n, int groups, double side) {
  SwarmState s;
  for (int i = 0; i < n; ++i) {
    const Vec2 p(side * rng.uniform(), side * rng.uniform());
    const Vec2 v(rng.uniform() - 0.5, rng.uniform() - 0.5);
    s.robots.push_back({i, p, v, rng.integer(0, groups - 1)});
  }
  return s;
}

inline GroupPartition partition_of(const SwarmState& s, int groups) {
  std::vector<int> labels;
  for (const auto& r : s.robots) labels.push_back(r.type);
  return GroupPartition::from_assignment(labels, groups);
}

}  // namespace grf::testing
