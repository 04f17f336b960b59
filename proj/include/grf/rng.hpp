#pragma once

#include <cstdint>
#include <random>

#include "grf/model.hpp"

namespace grf {

/// What a stream is used for; distinct purposes never share draws.
enum class StreamPurpose : std::uint64_t { sampling = 1, sensing = 2, initial_state = 3, test = 99 };

/// Independent random stream keyed by (run seed, robot, tick, purpose).
/// Streams are derived from the key alone, so the order in which robots are
/// updated cannot change any draw.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t robot, std::uint64_t tick,
               StreamPurpose purpose);
  explicit RandomStream(std::uint64_t seed)
      : RandomStream(seed, 0, 0, StreamPurpose::test) {}

  /// Uniform in [0, 1).
  double uniform() { return unit_(engine_); }
  double normal() { return normal_(engine_); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  /// mean + L z with z ~ N(0, I); L is a lower Cholesky factor.
  Vec2 gaussian(const Vec2& mean, const Mat2& chol) {
    const double z0 = normal();
    const double z1 = normal();
    return mean + chol * Vec2(z0, z1);
  }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace grf
