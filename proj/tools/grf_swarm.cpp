// grf-swarm: run, batch, shape and validate subcommands over scenario files.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grf/config_io.hpp"
#include "grf/harness.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct CommonArgs {
  std::string scenario;
  std::vector<std::string> overrides;
  std::string controller;
  std::string out_dir = "out";
  long stride = 0;
  int workers = grf::default_workers();
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario, "Scenario file (JSON)")->required();
  cmd->add_option("--set", args.overrides, "Override a scenario key, e.g. --set sampler.temperature=0.5");
  cmd->add_option("--controller", args.controller, "Controller: grf or gd")
      ->check(CLI::IsMember({"grf", "gd"}));
  cmd->add_option("--out-dir", args.out_dir, "Output directory");
  cmd->add_option("--stride", args.stride, "Ticks between metric samples")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", args.workers, "Worker threads (default: GRF_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
}

std::vector<std::string> all_overrides(const CommonArgs& args) {
  std::vector<std::string> out = args.overrides;
  if (!args.controller.empty()) out.push_back("controller=" + args.controller);
  if (args.stride > 0) out.push_back("stride=" + std::to_string(args.stride));
  return out;
}

/// Accepts "1,2,5" and inclusive ranges such as "1-20".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream list(text);
  for (std::string item; std::getline(list, item, ',');) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(std::stoull(item));
    } else {
      const auto lo = std::stoull(item.substr(0, dash));
      const auto hi = std::stoull(item.substr(dash + 1));
      if (hi < lo) throw grf::ConfigError({"seeds: empty range '" + item + "'"});
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    }
  }
  if (seeds.empty()) throw grf::ConfigError({"seeds: list is empty"});
  return seeds;
}

void print_summary(const grf::RunRecord& rec, const fs::path& dir, const std::string& stem) {
  std::cout << "controller=" << grf::to_string(rec.config.controller)
            << " seed=" << rec.config.rng_seed << " ticks=" << rec.config.max_ticks
            << " final_clusters=" << rec.final_cluster_count
            << " min_clusters=" << rec.min_cluster_count << " convergence_tick="
            << (rec.convergence_tick ? std::to_string(*rec.convergence_tick) : "none")
            << " max_displacement=" << rec.max_displacement << "\n"
            << "wrote " << (dir / (stem + ".metrics.jsonl")).string() << "\n";
}

int single_run(const CommonArgs& args, std::optional<std::uint64_t> seed, bool dump_states,
               bool report_attractors) {
  auto overrides = all_overrides(args);
  if (seed) overrides.push_back("seed=" + std::to_string(*seed));
  const grf::SwarmConfig config = grf::load_scenario(args.scenario, overrides);
  const std::string stem = grf::run_stem(config);
  const fs::path dir(args.out_dir);

  std::ostringstream states;
  grf::RunOptions options;
  options.workers = args.workers;
  if (dump_states) options.state_dump = &states;
  const grf::RunRecord rec = grf::execute_run(config, options);

  grf::write_run_outputs(rec, dir, stem);
  if (dump_states) grf::write_file_atomically(dir / (stem + ".states.jsonl"), states.str());
  print_summary(rec, dir, stem);
  if (report_attractors && !config.attractors.empty()) {
    const auto& final = rec.samples.back().attractor_distances;
    for (std::size_t type = 0; type < final.size(); ++type) {
      std::cout << "type " << type << " mean distance to attractors:";
      for (double d : final[type]) std::cout << ' ' << d;
      std::cout << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs random field swarm simulator"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::optional<std::uint64_t> run_seed;
  bool dump_states = false;
  auto* run = app.add_subcommand("run", "Execute one simulation run");
  add_common(run, run_args);
  run->add_option("--seed", run_seed, "Random seed (overrides the scenario)");
  run->add_flag("--dump-states", dump_states, "Also write per-tick robot states");

  CommonArgs shape_args;
  std::optional<std::uint64_t> shape_seed;
  bool shape_dump = false;
  auto* shape = app.add_subcommand("shape", "Run a scenario with virtual attractors");
  add_common(shape, shape_args);
  shape->add_option("--seed", shape_seed, "Random seed (overrides the scenario)");
  shape->add_flag("--dump-states", shape_dump, "Also write per-tick robot states");

  CommonArgs batch_args;
  std::string seeds_text = "1";
  std::vector<std::string> sweeps;
  std::string controllers_text = "grf";
  auto* batch = app.add_subcommand("batch", "Run a parameter grid over many seeds");
  add_common(batch, batch_args);
  batch->add_option("--seeds", seeds_text, "Seeds, e.g. 1,2,3 or 1-20");
  batch->add_option("--sweep", sweeps, "Swept key, e.g. --sweep group_size=10,30,60");
  batch->add_option("--controllers", controllers_text, "Comma-separated controllers");

  std::string validate_scenario;
  std::vector<std::string> validate_overrides;
  auto* validate = app.add_subcommand("validate", "Check a scenario and print it resolved");
  validate->add_option("--scenario", validate_scenario, "Scenario file (JSON)")->required();
  validate->add_option("--set", validate_overrides, "Override a scenario key");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return single_run(run_args, run_seed, dump_states, false);
    if (shape->parsed()) return single_run(shape_args, shape_seed, shape_dump, true);
    if (validate->parsed()) {
      const auto config = grf::load_scenario(validate_scenario, validate_overrides);
      std::cout << grf::to_json(config).dump(2) << "\n";
      return kExitOk;
    }
    if (batch->parsed()) {
      const auto seeds = parse_seeds(seeds_text);
      std::vector<grf::Controller> controllers;
      std::stringstream list(controllers_text);
      for (std::string c; std::getline(list, c, ',');) {
        if (c == "grf") {
          controllers.push_back(grf::Controller::grf);
        } else if (c == "gd") {
          controllers.push_back(grf::Controller::gd);
        } else {
          throw grf::ConfigError({"controllers: unknown controller '" + c + "'"});
        }
      }
      nlohmann::json tree = grf::read_scenario_file(batch_args.scenario);
      for (const auto& o : all_overrides(batch_args)) grf::apply_override(tree, o);
      const auto cells = grf::expand_sweeps(sweeps);
      const auto rows = grf::run_batch(tree, cells, seeds, controllers, batch_args.workers);
      const auto agg = grf::aggregate(rows);
      const fs::path dir(batch_args.out_dir);
      fs::create_directories(dir);
      grf::write_file_atomically(dir / "runs.csv", grf::runs_csv(rows));
      grf::write_file_atomically(dir / "aggregate.csv", grf::aggregate_csv(agg));
      std::cout << grf::aggregate_csv(agg);
      return kExitOk;
    }
  } catch (const grf::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
