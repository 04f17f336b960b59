#include "grf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "grf/config_io.hpp"
#include "grf/sim.hpp"

namespace grf {

using nlohmann::json;

RunRecord execute_run(const SwarmConfig& config, const RunOptions& options) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  RunRecord record;
  record.config = config;
  record.config_hash = config_hash(config);

  auto emit = [&](const SwarmState& state) {
    record.samples.push_back(measure(state, config));
    if (options.state_dump != nullptr) {
      for (const auto& r : state.robots) {
        *options.state_dump << json{{"tick", state.tick},   {"id", r.id},
                                    {"x", r.position.x()},  {"y", r.position.y()},
                                    {"vx", r.velocity.x()}, {"vy", r.velocity.y()},
                                    {"type", r.type}}
                                   .dump()
                            << '\n';
      }
    }
  };

  SwarmState state = initial_state(config);
  emit(state);
  for (long t = 0; t < config.max_ticks; ++t) {
    SwarmState next = step(state, config, options.workers);
    for (std::size_t i = 0; i < next.robots.size(); ++i) {
      record.max_displacement = std::max(
          record.max_displacement, (next.robots[i].position - state.robots[i].position).norm());
    }
    state = std::move(next);
    if (state.tick % config.stride == 0 || state.tick == config.max_ticks) emit(state);
  }

  record.final_cluster_count = record.samples.back().cluster_count;
  record.convergence_tick = convergence_iteration(record.samples);
  record.min_cluster_count =
      std::min_element(record.samples.begin(), record.samples.end(),
                       [](const auto& a, const auto& b) { return a.cluster_count < b.cluster_count; })
          ->cluster_count;
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return record;
}

json sample_to_json(const MetricSample& s) {
  json j{{"tick", s.tick},
         {"cluster_count", s.cluster_count},
         {"mean_intragroup_distance", nullptr},
         {"velocity_consensus_error", s.velocity_consensus_error},
         {"mean_speed", s.mean_speed}};
  if (s.mean_intragroup_distance) j["mean_intragroup_distance"] = *s.mean_intragroup_distance;
  if (!s.attractor_distances.empty()) j["attractor_distances"] = s.attractor_distances;
  return j;
}

std::string metric_stream(const RunRecord& record) {
  std::string out;
  for (const auto& s : record.samples) {
    out += sample_to_json(s).dump();
    out += '\n';
  }
  return out;
}

json record_to_json(const RunRecord& r) {
  json samples = json::array();
  for (const auto& s : r.samples) samples.push_back(sample_to_json(s));
  return json{{"schema_version", kRecordSchemaVersion},
              {"config", to_json(r.config)},
              {"config_hash", r.config_hash},
              {"seed", r.config.rng_seed},
              {"controller", to_string(r.config.controller)},
              {"initial_state",
               {{"placement", "uniform_rejection"},
                {"min_separation", 2.0 * r.config.robot_radius},
                {"initial_velocity", "zero"}}},
              {"ci_method", "normal"},
              {"samples", samples},
              {"final_cluster_count", r.final_cluster_count},
              {"min_cluster_count", r.min_cluster_count},
              {"convergence_tick", r.convergence_tick ? json(*r.convergence_tick) : json(nullptr)},
              {"max_displacement", r.max_displacement},
              {"wall_seconds", r.wall_seconds}};
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string run_stem(const SwarmConfig& config) {
  std::string name = config.name.empty() ? "run" : config.name;
  std::replace_if(name.begin(), name.end(), [](char c) { return !(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'); }, '_');
  return name + "_seed" + std::to_string(config.rng_seed) + "_" + to_string(config.controller);
}

void write_run_outputs(const RunRecord& record, const std::filesystem::path& dir,
                       const std::string& stem) {
  std::filesystem::create_directories(dir);
  write_file_atomically(dir / (stem + ".metrics.jsonl"), metric_stream(record));
  write_file_atomically(dir / (stem + ".record.json"), record_to_json(record).dump(2) + "\n");
}

std::vector<BatchCell> expand_sweeps(std::span<const std::string> sweeps) {
  std::vector<BatchCell> cells{{"", {}}};
  for (const auto& sweep : sweeps) {
    const auto eq = sweep.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == sweep.size()) {
      throw ConfigError({"sweep '" + sweep + "': expected key=v1,v2,..."});
    }
    const std::string key = sweep.substr(0, eq);
    std::vector<std::string> values;
    std::stringstream list(sweep.substr(eq + 1));
    for (std::string v; std::getline(list, v, ',');) {
      if (!v.empty()) values.push_back(v);
    }
    std::vector<BatchCell> next;
    for (const auto& cell : cells) {
      for (const auto& v : values) {
        BatchCell c = cell;
        c.label += (c.label.empty() ? "" : ";") + key + "=" + v;
        c.overrides.push_back(key + "=" + v);
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }
  if (cells.size() == 1 && cells.front().label.empty()) cells.front().label = "base";
  return cells;
}

MeanInterval mean_interval(std::span<const double> values, double z) {
  if (values.empty()) return {std::nan(""), std::nan(""), std::nan("")};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  if (values.size() < 2) return {mean, mean, mean};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double half = z * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return {mean, mean - half, mean + half};
}

BatchError::BatchError(const std::string& cell, Controller controller, std::uint64_t seed,
                       const std::string& what)
    : std::runtime_error("batch cell '" + cell + "' controller=" + to_string(controller) +
                         " seed=" + std::to_string(seed) + " failed: " + what) {}

std::vector<BatchRow> run_batch(const json& scenario, std::span<const BatchCell> cells,
                                std::span<const std::uint64_t> seeds,
                                std::span<const Controller> controllers, int workers) {
  if (seeds.empty()) throw ConfigError({"batch: seed list is empty"});
  if (controllers.empty()) throw ConfigError({"batch: controller list is empty"});

  struct Job {
    const BatchCell* cell;
    Controller controller;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& cell : cells) {
    for (Controller c : controllers) {
      for (std::uint64_t s : seeds) jobs.push_back({&cell, c, s});
    }
  }

  // Resolve every configuration up front so an invalid cell fails before any run.
  std::vector<SwarmConfig> configs;
  configs.reserve(jobs.size());
  for (const auto& job : jobs) {
    try {
      json tree = scenario;
      for (const auto& o : job.cell->overrides) apply_override(tree, o);
      tree["seed"] = job.seed;
      tree["controller"] = to_string(job.controller);
      configs.push_back(parse_config(tree));
    } catch (const std::exception& e) {
      throw BatchError(job.cell->label, job.controller, job.seed, e.what());
    }
  }

  std::vector<BatchRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::optional<BatchError> error;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size() || failed.load()) return;
      const auto& job = jobs[k];
      try {
        const RunRecord rec = execute_run(configs[k]);
        const auto& last = rec.samples.back();
        rows[k] = BatchRow{job.cell->label,
                           job.controller,
                           job.seed,
                           rec.final_cluster_count,
                           rec.min_cluster_count,
                           rec.convergence_tick.value_or(0),
                           last.velocity_consensus_error,
                           last.mean_intragroup_distance,
                           last.mean_speed,
                           rec.max_displacement};
      } catch (const std::exception& e) {
        std::scoped_lock lock(error_mutex);
        if (!error) error.emplace(job.cell->label, job.controller, job.seed, e.what());
        failed = true;
        return;
      }
    }
  };

  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) throw *error;
  return rows;
}

std::vector<AggregateRow> aggregate(std::span<const BatchRow> rows) {
  std::vector<AggregateRow> out;
  std::vector<std::vector<const BatchRow*>> members;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const AggregateRow& a) {
      return a.cell == row.cell && a.controller == row.controller;
    });
    if (it == out.end()) {
      out.push_back({row.cell, row.controller, 0, {}, {}, {}});
      members.emplace_back();
      it = out.end() - 1;
    }
    members[static_cast<std::size_t>(it - out.begin())].push_back(&row);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::vector<double> finals, mins, ticks;
    for (const BatchRow* r : members[k]) {
      finals.push_back(r->final_cluster_count);
      mins.push_back(r->min_cluster_count);
      ticks.push_back(static_cast<double>(r->convergence_tick));
    }
    out[k].runs = static_cast<int>(members[k].size());
    out[k].final_cluster_count = mean_interval(finals);
    out[k].min_cluster_count = mean_interval(mins);
    out[k].convergence_tick = mean_interval(ticks);
  }
  return out;
}

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\";\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string runs_csv(std::span<const BatchRow> rows) {
  std::ostringstream out;
  out << "cell,controller,seed,final_cluster_count,min_cluster_count,convergence_tick,"
         "final_velocity_consensus_error,final_mean_intragroup_distance,final_mean_speed,"
         "max_displacement\n";
  for (const auto& r : rows) {
    out << quoted(r.cell) << ',' << to_string(r.controller) << ',' << r.seed << ','
        << r.final_cluster_count << ',' << r.min_cluster_count << ',' << r.convergence_tick << ','
        << number(r.final_velocity_consensus_error) << ','
        << (r.final_mean_intragroup_distance ? number(*r.final_mean_intragroup_distance) : "")
        << ',' << number(r.final_mean_speed) << ',' << number(r.max_displacement) << '\n';
  }
  return out.str();
}

std::string aggregate_csv(std::span<const AggregateRow> rows) {
  std::ostringstream out;
  out << "cell,controller,runs";
  for (const char* m : {"final_cluster_count", "min_cluster_count", "convergence_tick"}) {
    out << ',' << m << "_mean," << m << "_ci99_low," << m << "_ci99_high";
  }
  out << ",ci_method\n";
  for (const auto& r : rows) {
    out << quoted(r.cell) << ',' << to_string(r.controller) << ',' << r.runs;
    for (const MeanInterval* m : {&r.final_cluster_count, &r.min_cluster_count, &r.convergence_tick}) {
      out << ',' << number(m->mean) << ',' << number(m->low) << ',' << number(m->high);
    }
    out << ",normal\n";
  }
  return out.str();
}

int default_workers() {
  if (const char* env = std::getenv("GRF_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace grf
