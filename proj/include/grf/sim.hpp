#pragma once

// Synchronous swarm update: every robot senses the tick-t snapshot, picks its
// next velocity, then all robots move together.

#include <functional>
#include <span>

#include "grf/metrics.hpp"
#include "grf/model.hpp"
#include "grf/potential.hpp"
#include "grf/rng.hpp"

namespace grf {

/// Sensor corruption. Sigmas scale with the sensing radius and v_max; in
/// bounded mode each component is a Gaussian truncated at +-sigma.
struct NoiseParams {
  double fraction = 0.0;
  double position_sigma = 0.0;
  double velocity_sigma = 0.0;
  Truncation truncation = Truncation::bounded;

  static NoiseParams from(const SwarmConfig& config);
  bool active() const { return fraction > 0.0; }
};

/// Observations of robot i: every other robot and obstacle point within the
/// sensing radius (inclusive), range-tested on true positions and then
/// corrupted independently. Obstacle points are not corrupted.
LocalView sense(int robot, const SwarmState& state, const SwarmConfig& config,
                const NoiseParams& noise, RandomStream& rng);

/// Random placement with pairwise separation >= 2 robot radii; velocities zero.
/// Depends only on the seed and the geometry, never on the controller.
SwarmState initial_state(const SwarmConfig& config);

/// One synchronous tick. `workers` threads split the robots; `order`, when
/// given, is the sequence in which robot updates are issued. Neither changes
/// the result.
SwarmState step(const SwarmState& state, const SwarmConfig& config, int workers = 1,
                std::span<const int> order = {});

using SampleSink = std::function<void(const SwarmState&, const MetricSample&)>;

/// Steps from the initial state to max_ticks, calling `sink` at tick 0, every
/// `stride` ticks and at the final tick. Returns the final state.
SwarmState run(const SwarmConfig& config, const SampleSink& sink, int workers = 1);

/// Same, starting from a given state.
SwarmState run_from(SwarmState state, const SwarmConfig& config, const SampleSink& sink,
                    int workers = 1);

}  // namespace grf
