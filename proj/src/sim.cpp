#include "grf/sim.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <vector>

#include "grf/baseline_gd.hpp"
#include "grf/sampler.hpp"

namespace grf {

namespace {

double corrupt(double sigma, Truncation truncation, RandomStream& rng) {
  if (sigma <= 0.0) return 0.0;
  if (truncation == Truncation::unbounded) return sigma * rng.normal();
  for (;;) {
    const double z = rng.normal();
    if (std::abs(z) <= 1.0) return sigma * z;
  }
}

Vec2 next_velocity(const LocalView& view, const RobotState& robot, const SwarmConfig& config,
                   const EnergyModel& model, long tick) {
  if (config.controller == Controller::gd) {
    return gd_velocity(view, robot.velocity, model, config.gd);
  }
  RandomStream rng(config.rng_seed, static_cast<std::uint64_t>(robot.id),
                   static_cast<std::uint64_t>(tick), StreamPurpose::sampling);
  return metropolis_update(view, robot.velocity, model, config.sampler, rng);
}

}  // namespace

NoiseParams NoiseParams::from(const SwarmConfig& config) {
  return {config.noise_fraction, config.noise_fraction * config.sensing_radius,
          config.noise_fraction * config.v_max, config.noise_truncation};
}

LocalView sense(int robot, const SwarmState& state, const SwarmConfig& config,
                const NoiseParams& noise, RandomStream& rng) {
  const auto& self = state.robots.at(static_cast<std::size_t>(robot));
  const double radius = config.sensing_radius;
  double range_limit = radius;
  if (noise.active()) {
    range_limit = noise.truncation == Truncation::bounded
                      ? radius + std::sqrt(2.0) * noise.position_sigma
                      : std::numeric_limits<double>::infinity();
  }
  LocalView view(self.position, self.type, range_limit);
  view.set_attractors(config.attractors);

  const double r2 = radius * radius;
  for (const auto& other : state.robots) {
    if (other.id == self.id) continue;
    Vec2 rel = other.position - self.position;
    if (rel.squaredNorm() > r2) continue;
    Vec2 vel = other.velocity;
    if (noise.active()) {
      rel.x() += corrupt(noise.position_sigma, noise.truncation, rng);
      rel.y() += corrupt(noise.position_sigma, noise.truncation, rng);
      vel.x() += corrupt(noise.velocity_sigma, noise.truncation, rng);
      vel.y() += corrupt(noise.velocity_sigma, noise.truncation, rng);
    }
    view.add({rel, vel, other.type, ObservationKind::robot});
  }
  for (const auto& point : config.arena.obstacle_points) {
    const Vec2 rel = point - self.position;
    if (rel.squaredNorm() > r2) continue;
    view.add({rel, Vec2::Zero(), -1, ObservationKind::obstacle_point});
  }
  return view;
}

SwarmState initial_state(const SwarmConfig& config) {
  SwarmState state;
  const int n = config.partition.robot_count();
  state.robots.reserve(static_cast<std::size_t>(n));
  RandomStream rng(config.rng_seed, 0, 0, StreamPurpose::initial_state);

  const double margin = config.robot_radius;
  const double span_x = config.arena.width - 2.0 * margin;
  const double span_y = config.arena.height - 2.0 * margin;
  const double separation = 2.0 * config.robot_radius;
  constexpr int kMaxAttempts = 100000;
  for (int id = 0; id < n; ++id) {
    Vec2 p;
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == kMaxAttempts) {
        throw ConfigError({"arena: cannot place " + std::to_string(n) +
                           " robots with the required separation"});
      }
      p = Vec2(margin + span_x * rng.uniform(), margin + span_y * rng.uniform());
      bool clear = true;
      for (const auto& r : state.robots) {
        if ((r.position - p).norm() < separation) {
          clear = false;
          break;
        }
      }
      if (clear) break;
    }
    state.robots.push_back({id, p, Vec2::Zero(), config.partition.group_of(id)});
  }
  return state;
}

SwarmState step(const SwarmState& state, const SwarmConfig& config, int workers,
                std::span<const int> order) {
  const std::size_t n = state.robots.size();
  std::vector<int> sequence;
  if (order.empty()) {
    sequence.resize(n);
    std::iota(sequence.begin(), sequence.end(), 0);
  } else {
    sequence.assign(order.begin(), order.end());
  }

  const EnergyModel model = EnergyModel::from(config);
  const NoiseParams noise = NoiseParams::from(config);
  std::vector<Vec2> velocities(n, Vec2::Zero());

  auto update = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto i = static_cast<std::size_t>(sequence[k]);
      const auto& robot = state.robots[i];
      RandomStream sensing(config.rng_seed, static_cast<std::uint64_t>(robot.id),
                           static_cast<std::uint64_t>(state.tick), StreamPurpose::sensing);
      const LocalView view = sense(static_cast<int>(i), state, config, noise, sensing);
      velocities[i] = next_velocity(view, robot, config, model, state.tick);
    }
  };

  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (threads <= 1) {
    update(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      pool.emplace_back(update, begin, std::min(n, begin + chunk));
    }
  }

  SwarmState next;
  next.tick = state.tick + 1;
  next.robots = state.robots;
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = next.robots[i];
    r.velocity = velocities[i];
    r.position = config.arena.clamp(kinematic_step(r.position, r.velocity, config.tick_duration));
  }
  return next;
}

SwarmState run_from(SwarmState state, const SwarmConfig& config, const SampleSink& sink,
                    int workers) {
  if (sink) sink(state, measure(state, config));
  const long start = state.tick;
  for (long t = start; t < config.max_ticks; ++t) {
    state = step(state, config, workers);
    if (sink && (state.tick % config.stride == 0 || state.tick == config.max_ticks)) {
      sink(state, measure(state, config));
    }
  }
  return state;
}

SwarmState run(const SwarmConfig& config, const SampleSink& sink, int workers) {
  config.validate();
  return run_from(initial_state(config), config, sink, workers);
}

}  // namespace grf
