#include "grf/sampler.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace grf {

Vec2 burn_in_average(const ChainTrace& trace, int burn_in, double v_max) {
  const int iterations = static_cast<int>(trace.velocities.size()) - 1;
  if (burn_in < 0 || burn_in >= iterations) {
    throw std::invalid_argument("burn_in must satisfy 0 <= burn_in < iterations");
  }
  // Deviations from the first kept state, so a chain that never moved
  // returns that state exactly.
  const Vec2& first = trace.velocities[static_cast<std::size_t>(burn_in) + 1];
  Vec2 deviation = Vec2::Zero();
  for (int k = burn_in + 2; k <= iterations; ++k) {
    deviation += trace.velocities[static_cast<std::size_t>(k)] - first;
  }
  Vec2 mean = first + deviation / static_cast<double>(iterations - burn_in);
  const double speed = mean.norm();
  if (speed > v_max) mean *= v_max / speed;
  return mean;
}

Vec2 metropolis_update(const LocalView& view, const Vec2& velocity, const EnergyModel& model,
                       const SamplerParams& sampler, RandomStream& rng, ChainTrace* trace) {
  if (sampler.burn_in < 0 || sampler.burn_in >= sampler.iterations) {
    throw std::invalid_argument("sampler: burn_in must satisfy 0 <= burn_in < iterations");
  }
  const Mat2 chol = sampler.proposal_covariance.llt().matrixL();
  const bool chain_centred = sampler.center_mode == CenterMode::chain_state;
  auto energy = [&](const Vec2& v) { return hamiltonian(view, v, model); };
  auto propose = [&](const Vec2& state, RandomStream& r) -> std::optional<Vec2> {
    return r.gaussian(chain_centred ? state : velocity, chol);
  };
  ChainTrace chain = run_chain(velocity, sampler.iterations, sampler.temperature, model.v_max,
                               energy, propose, rng);
  const Vec2 next = burn_in_average(chain, sampler.burn_in, model.v_max);
  if (trace != nullptr) *trace = std::move(chain);
  return next;
}

std::vector<double> boltzmann_pmf(std::span<const double> energies, double temperature) {
  if (energies.empty()) throw std::invalid_argument("boltzmann_pmf: empty support");
  if (!(temperature > 0.0)) throw std::invalid_argument("boltzmann_pmf: temperature must be > 0");
  double lowest = std::numeric_limits<double>::infinity();
  for (double e : energies) {
    if (!std::isnan(e)) lowest = std::min(lowest, e);
  }
  if (!std::isfinite(lowest)) throw std::invalid_argument("boltzmann_pmf: no finite energy");
  std::vector<double> pmf(energies.size());
  double total = 0.0;
  for (std::size_t k = 0; k < energies.size(); ++k) {
    const double e = energies[k];
    pmf[k] = std::isnan(e) ? 0.0 : std::exp(-(e - lowest) / temperature);
    total += pmf[k];
  }
  for (double& p : pmf) p /= total;
  return pmf;
}

std::vector<double> gibbs_local_pmf(const LocalView& view, std::span<const Vec2> grid,
                                    const EnergyModel& model, double temperature) {
  if (grid.empty()) throw std::invalid_argument("gibbs_local_pmf: empty velocity grid");
  std::vector<double> energies;
  energies.reserve(grid.size());
  for (const auto& z : grid) {
    if (z.norm() > model.v_max) {
      throw std::invalid_argument("gibbs_local_pmf: grid point faster than v_max");
    }
    energies.push_back(hamiltonian(view, z, model));
  }
  return boltzmann_pmf(energies, temperature);
}

std::vector<Vec2> velocity_grid(int n, double v_max) {
  if (n < 1) throw std::invalid_argument("velocity_grid: n must be >= 1");
  std::vector<Vec2> grid;
  grid.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  if (n == 1) {
    grid.emplace_back(0.0, 0.0);
    return grid;
  }
  const double half = 0.5 * (n - 1);
  const double spacing = v_max * (1.0 - 1e-9) / (half * std::sqrt(2.0));
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      grid.emplace_back((col - half) * spacing, (row - half) * spacing);
    }
  }
  return grid;
}

}  // namespace grf
