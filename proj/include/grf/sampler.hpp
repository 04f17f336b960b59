#pragma once

// Per-robot Metropolis chain over candidate velocities, and the exact
// discrete Gibbs conditional used to validate it.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "grf/model.hpp"
#include "grf/potential.hpp"
#include "grf/rng.hpp"

namespace grf {

/// Full history of one chain: entry 0 is the starting velocity and energy.
struct ChainTrace {
  std::vector<Vec2> velocities;
  std::vector<double> energies;
  int acceptance_count = 0;
};

/// Metropolis rule: downhill moves always pass, uphill ones with probability
/// exp(-dE/T). A NaN difference is a rejection.
inline bool metropolis_accept(double delta_energy, double temperature, double u) {
  if (std::isnan(delta_energy)) return false;
  if (delta_energy < 0.0) return true;
  return u < std::exp(-delta_energy / temperature);
}

/// Runs `iterations` proposal rounds from `start`. `propose(state, rng)`
/// returns the candidate or nullopt for an automatic rejection; candidates
/// faster than v_max and candidates with non-finite energy are rejected too.
/// One uniform is drawn per round whatever the outcome.
template <class EnergyFn, class ProposalFn>
ChainTrace run_chain(const Vec2& start, int iterations, double temperature, double v_max,
                     EnergyFn&& energy, ProposalFn&& propose, RandomStream& rng) {
  ChainTrace trace;
  trace.velocities.reserve(static_cast<std::size_t>(iterations) + 1);
  trace.energies.reserve(static_cast<std::size_t>(iterations) + 1);
  trace.velocities.push_back(start);
  trace.energies.push_back(energy(start));
  for (int k = 1; k <= iterations; ++k) {
    const Vec2 state = trace.velocities.back();
    const double state_energy = trace.energies.back();
    const std::optional<Vec2> candidate = propose(state, rng);
    const double u = rng.uniform();
    if (candidate && candidate->norm() <= v_max) {
      const double candidate_energy = energy(*candidate);
      if (std::isfinite(candidate_energy) &&
          metropolis_accept(candidate_energy - state_energy, temperature, u)) {
        trace.velocities.push_back(*candidate);
        trace.energies.push_back(candidate_energy);
        ++trace.acceptance_count;
        continue;
      }
    }
    trace.velocities.push_back(state);
    trace.energies.push_back(state_energy);
  }
  return trace;
}

/// Mean of the post-burn-in states V(q+1)..V(I), projected back onto the
/// v_max ball if rounding pushed it out.
Vec2 burn_in_average(const ChainTrace& trace, int burn_in, double v_max);

/// One velocity update for robot i (Gaussian proposals around the previous
/// velocity or the chain state, per sampler.center_mode).
Vec2 metropolis_update(const LocalView& view, const Vec2& velocity, const EnergyModel& model,
                       const SamplerParams& sampler, RandomStream& rng,
                       ChainTrace* trace = nullptr);

/// exp(-E/T) normalised over the given energies (log-sum-exp).
std::vector<double> boltzmann_pmf(std::span<const double> energies, double temperature);

/// Discrete Gibbs conditional of robot i over a finite velocity grid.
/// Throws std::invalid_argument for an empty grid or a grid point outside the
/// v_max ball.
std::vector<double> gibbs_local_pmf(const LocalView& view, std::span<const Vec2> grid,
                                    const EnergyModel& model, double temperature);

/// n x n square grid centred at the origin whose corners lie just inside the
/// v_max ball. Row-major, index = row * n + col.
std::vector<Vec2> velocity_grid(int n, double v_max);

}  // namespace grf
