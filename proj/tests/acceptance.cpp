// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "grf/config_io.hpp"
#include "grf/harness.hpp"
#include "grf/sampler.hpp"
#include "grf/sim.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace grf;
namespace fs = std::filesystem;

namespace {

int failures = 0;
double max_displacement_seen = 0.0;
double cap_seen = 0.0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

fs::path scenario(const std::string& name) { return fs::path(GRF_SCENARIO_DIR) / name; }

void note_displacement(double d, double cap) {
  max_displacement_seen = std::max(max_displacement_seen, d);
  cap_seen = cap;
}

// -----------------------------------------------------------------------------

void potential_shape() {
  const auto t0 = std::chrono::steady_clock::now();
  const PotentialParams p;
  const double lambda = 0.5;
  const int n = 10000;
  std::vector<double> r(n), same(n), cross(n);
  const double c_same = charge_product(0, 0, p);
  const double c_cross = charge_product(0, 1, p);
  for (int k = 0; k < n; ++k) {
    r[k] = p.d_min + (lambda - p.d_min) * (k + 1) / n;
    same[k] = coulomb_buckingham(r[k], c_same, p);
    cross[k] = coulomb_buckingham(r[k], c_cross, p);
  }
  int sign_changes = 0;
  int interior_minima = 0;
  std::size_t argmin = 0;
  for (int k = 1; k + 1 < n; ++k) {
    const bool down_before = same[k] < same[k - 1];
    const bool up_after = same[k + 1] > same[k];
    if (down_before && up_after) {
      ++interior_minima;
      argmin = static_cast<std::size_t>(k);
    }
    if ((same[k] - same[k - 1] < 0) != (same[k + 1] - same[k] < 0)) ++sign_changes;
  }
  bool cross_decreasing = true;
  for (int k = 1; k < n; ++k) cross_decreasing = cross_decreasing && cross[k] < cross[k - 1];
  const double elapsed = seconds_since(t0);
  const bool pass = interior_minima == 1 && sign_changes == 1 && same[argmin] < 0.0 &&
                    cross_decreasing && elapsed < 1.0;
  report("potential_shape", pass,
         "same-type minima=" + std::to_string(interior_minima) + " at r*=" + fmt(r[argmin]) +
             " phi*=" + fmt(same[argmin]) + ", slope sign changes=" + std::to_string(sign_changes) +
             ", cross-type strictly decreasing=" + (cross_decreasing ? "yes" : "no") + ", " +
             fmt(elapsed, 3) + " s");
}

void well_identity() {
  RandomStream rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    PotentialParams p;
    p.epsilon = 0.01 + 10.0 * rng.uniform();
    p.r0 = 0.01 + 2.0 * rng.uniform();
    p.alpha = 6.0 + 1e-3 + 100.0 * rng.uniform();
    const double e = coulomb_buckingham(p.r0, 0.0, p);
    worst = std::max(worst, std::abs(e + p.epsilon) / p.epsilon);
  }
  report("well_identity", worst <= 1e-12, "max relative error " + fmt(worst, 3) + " over 100 draws");
}

void sampler_vs_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  EnergyModel m;
  LocalView view({2, 2}, 0, 0.5);
  view.add({{0.3, 0.0}, {0.5, 0.0}, 0, ObservationKind::robot});
  view.add({{0.0, -0.35}, {0.0, 0.4}, 1, ObservationKind::robot});
  view.add({{-0.4, 0.0}, {0, 0}, -1, ObservationKind::obstacle_point});
  const int n = 9;
  const double temperature = 1.0;
  const auto grid = velocity_grid(n, m.v_max);
  const auto pmf = gibbs_local_pmf(view, grid, m, temperature);
  const auto counts =
      oracle::grid_chain_histogram(view, m, grid, n, temperature, 100000, 5000, 31337);
  const double tv = oracle::total_variation(counts, pmf);
  const double elapsed = seconds_since(t0);
  report("sampler_vs_oracle", tv < 0.05 && elapsed < 30.0,
         "TV distance " + fmt(tv) + " over 1e5 chain states on a 9x9 grid, " + fmt(elapsed, 3) + " s");
}

void literal_energy_descent() {
  // previous_velocity centring is the default, i.e. the literal update rule
  const SwarmConfig defaults = parse_config(nlohmann::json{{"groups", {1, 1}}});
  const EnergyModel m = EnergyModel::from(defaults);
  const SamplerParams s = defaults.sampler;
  const auto grid = velocity_grid(9, m.v_max);
  RandomStream gen(77);
  int lower = 0;
  const int states = 200;
  const int updates = 20;
  for (int k = 0; k < states; ++k) {
    // a random neighbourhood and a starting velocity above the grid-average energy
    LocalView view;
    Vec2 start;
    double start_energy = 0.0;
    for (;;) {
      view = LocalView({2, 2}, 0, 0.5);
      const int count = gen.integer(0, 4);
      for (int j = 0; j < count; ++j) {
        const double r = 0.15 + 0.34 * gen.uniform();
        const double th = 6.283185307179586 * gen.uniform();
        view.add({{r * std::cos(th), r * std::sin(th)},
                  {0.8 * (gen.uniform() - 0.5), 0.8 * (gen.uniform() - 0.5)},
                  gen.integer(0, 1), ObservationKind::robot});
      }
      start = Vec2(gen.uniform() - 0.5, gen.uniform() - 0.5) * 0.6;
      start_energy = hamiltonian(view, start, m);
      double grid_mean = 0.0;
      for (const auto& z : grid) grid_mean += hamiltonian(view, z, m);
      grid_mean /= static_cast<double>(grid.size());
      if (start_energy > grid_mean) break;
    }
    double mean = 0.0;
    for (int u = 0; u < updates; ++u) {
      RandomStream rng(5, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(u),
                       StreamPurpose::sampling);
      mean += hamiltonian(view, metropolis_update(view, start, m, s, rng), m);
    }
    mean /= updates;
    if (mean < start_energy) ++lower;
  }
  const double share = static_cast<double>(lower) / states;
  report("literal_energy_descent", share >= 0.95,
         std::to_string(lower) + "/" + std::to_string(states) +
             " high-energy states end lower on average (" + std::to_string(updates) +
             " updates each)");
}

void segregation_and_gd_contrast() {
  const auto t0 = std::chrono::steady_clock::now();
  const nlohmann::json tree = read_scenario_file(scenario("desk_segregation.json"));
  const SwarmConfig base = parse_config(tree);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  const std::vector<Controller> controllers{Controller::grf, Controller::gd};
  const auto rows = run_batch(tree, expand_sweeps({}), seeds, controllers, default_workers());
  const double elapsed = seconds_since(t0);

  int reached = 0;
  double grf_final = 0.0;
  double gd_final = 0.0;
  const int groups = base.partition.group_count();
  for (const auto& r : rows) {
    note_displacement(r.max_displacement, base.displacement_cap());
    if (r.controller == Controller::grf) {
      if (r.min_cluster_count == groups) ++reached;
      grf_final += r.final_cluster_count;
    } else {
      gd_final += r.final_cluster_count;
    }
  }
  grf_final /= 20.0;
  gd_final /= 20.0;
  report("desk_segregation", reached >= 16 && elapsed < 300.0,
         std::to_string(reached) + "/20 seeds reach " + std::to_string(groups) + " clusters within " +
             std::to_string(base.max_ticks) + " ticks (batch of 40 runs took " + fmt(elapsed, 3) +
             " s)");
  report("gd_trapping_contrast", gd_final > grf_final,
         "mean final clusters GD " + fmt(gd_final) + " vs GRF " + fmt(grf_final));
}

struct FlockSummary {
  double consensus = 0.0;
  double speed = 0.0;
};

FlockSummary post_convergence(const RunRecord& rec) {
  const long from = rec.convergence_tick.value_or(0);
  FlockSummary s;
  int n = 0;
  for (const auto& m : rec.samples) {
    if (m.tick < from) continue;
    s.consensus += m.velocity_consensus_error;
    s.speed += m.mean_speed;
    ++n;
  }
  s.consensus /= n;
  s.speed /= n;
  return s;
}

void flocking() {
  const auto path = scenario("desk_flocking.json");
  double consensus = 0.0;
  double speed = 0.0;
  int noisier = 0;
  double v_max = 1.0;
  for (int seed = 1; seed <= 10; ++seed) {
    const std::vector<std::string> clean{"seed=" + std::to_string(seed), "noise.fraction=0"};
    const std::vector<std::string> noisy{"seed=" + std::to_string(seed), "noise.fraction=0.1"};
    const SwarmConfig a = load_scenario(path, clean);
    const SwarmConfig b = load_scenario(path, noisy);
    v_max = a.v_max;
    const RunRecord ra = execute_run(a, {default_workers(), nullptr});
    const RunRecord rb = execute_run(b, {default_workers(), nullptr});
    note_displacement(ra.max_displacement, a.displacement_cap());
    note_displacement(rb.max_displacement, b.displacement_cap());
    const auto sa = post_convergence(ra);
    const auto sb = post_convergence(rb);
    consensus += sa.consensus;
    speed += sa.speed;
    if (sb.consensus > sa.consensus) ++noisier;
  }
  consensus /= 10.0;
  speed /= 10.0;
  report("flocking_consensus", consensus < 0.1 * v_max && speed > 0.9 * v_max,
         "noise-free post-convergence consensus error " + fmt(consensus) + " m/s, mean speed " +
             fmt(speed) + " m/s (10 seeds)");
  report("noise_monotonicity", noisier >= 8,
         std::to_string(noisier) + "/10 paired seeds have higher consensus error at 10% noise");
}

void metric_oracles() {
  RandomStream rng(4242);
  int cluster_matches = 0;
  double worst = 0.0;
  bool presence = true;
  for (int k = 0; k < 200; ++k) {
    const SwarmState s = testing::random_state(rng, 30, 3, 2.0);
    const auto p = testing::partition_of(s, 3);
    if (cluster_count(s.robots, p, 0.3) == oracle::cluster_count_bfs(s.robots, 0.3)) ++cluster_matches;
    const auto got = mean_intragroup_distance(s.robots, p);
    const auto want = oracle::intragroup_all_pairs(s.robots, 3);
    presence = presence && got.has_value() == want.has_value();
    if (got && want) worst = std::max(worst, std::abs(*got - *want));
  }
  report("metric_oracles", cluster_matches == 200 && presence && worst <= 1e-12,
         "cluster count matched BFS on " + std::to_string(cluster_matches) +
             "/200 states; intragroup distance max error " + fmt(worst, 3));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism() {
  const fs::path dir = fs::temp_directory_path() / ("grf_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const std::string base = std::string(GRF_CLI_PATH) + " run --scenario " +
                           scenario("desk_segregation.json").string() +
                           " --seed 3 --set max_ticks=1000 --out-dir ";
  const int a = std::system((base + (dir / "a").string() + " >/dev/null").c_str());
  const int b = std::system((base + (dir / "b").string() + " >/dev/null").c_str());
  const std::string stem = "desk_segregation_seed3_grf.metrics.jsonl";
  const std::string first = slurp(dir / "a" / stem);
  const bool bytes_equal = a == 0 && b == 0 && !first.empty() && first == slurp(dir / "b" / stem);
  fs::remove_all(dir);

  // per-tick states under different worker counts
  const std::vector<std::string> overrides{"max_ticks=300", "stride=1", "noise.fraction=0.05"};
  const SwarmConfig c = load_scenario(scenario("desk_segregation.json"), overrides);
  std::ostringstream one, four;
  const RunRecord r1 = execute_run(c, {1, &one});
  const RunRecord r4 = execute_run(c, {4, &four});
  SwarmConfig g = c;
  g.controller = Controller::gd;
  std::ostringstream g1, g3;
  execute_run(g, {1, &g1});
  execute_run(g, {3, &g3});
  const bool workers_equal = one.str() == four.str() && metric_stream(r1) == metric_stream(r4) &&
                             g1.str() == g3.str();
  report("determinism", bytes_equal && workers_equal,
         std::string("repeated CLI runs byte-identical: ") + (bytes_equal ? "yes" : "no") +
             "; 300 ticks of per-tick states equal across 1/3/4 workers: " +
             (workers_equal ? "yes" : "no"));
}

void displacement_cap() {
  const bool pass = max_displacement_seen <= cap_seen + 1e-12;
  report("displacement_cap", pass,
         "max per-tick displacement " + fmt(max_displacement_seen, 17) + " m vs cap " +
             fmt(cap_seen, 17) + " m over every acceptance run");
}

}  // namespace

int main() {
  try {
    potential_shape();
    well_identity();
    sampler_vs_oracle();
    literal_energy_descent();
    metric_oracles();
    determinism();
    segregation_and_gd_contrast();
    flocking();
    displacement_cap();
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
