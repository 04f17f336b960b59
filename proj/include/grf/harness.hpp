#pragma once

// Experiment runner: single runs with reproducible records, seeded batches
// over a parameter grid, and the file formats consumed by the plotting tools.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "grf/metrics.hpp"
#include "grf/model.hpp"

namespace grf {

inline constexpr int kRecordSchemaVersion = 1;

struct RunRecord {
  SwarmConfig config;
  std::string config_hash;
  std::vector<MetricSample> samples;
  int final_cluster_count = 0;
  int min_cluster_count = 0;
  std::optional<long> convergence_tick;
  double max_displacement = 0.0;
  double wall_seconds = 0.0;
};

struct RunOptions {
  int workers = 1;
  /// When set, one line per robot per emitted tick:
  /// {"tick","id","x","y","vx","vy","type"}.
  std::ostream* state_dump = nullptr;
};

RunRecord execute_run(const SwarmConfig& config, const RunOptions& options = {});

nlohmann::json sample_to_json(const MetricSample& sample);

/// Line-delimited metric samples; identical inputs give identical bytes.
std::string metric_stream(const RunRecord& record);

/// Everything needed to reproduce the run, plus its outcome.
nlohmann::json record_to_json(const RunRecord& record);

/// Writes `<stem>.metrics.jsonl` and `<stem>.record.json` under `dir`, each
/// through a temporary file and a rename.
void write_run_outputs(const RunRecord& record, const std::filesystem::path& dir,
                       const std::string& stem);

std::string run_stem(const SwarmConfig& config);

void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

// --- batches --------------------------------------------------------------

struct BatchCell {
  std::string label;                   // e.g. "group_size=30"
  std::vector<std::string> overrides;  // key=value, applied on top of the scenario
};

/// Cartesian product of `key=v1,v2,...` sweeps. No sweeps gives one cell
/// labelled "base".
std::vector<BatchCell> expand_sweeps(std::span<const std::string> sweeps);

struct BatchRow {
  std::string cell;
  Controller controller = Controller::grf;
  std::uint64_t seed = 0;
  int final_cluster_count = 0;
  int min_cluster_count = 0;
  long convergence_tick = 0;
  double final_velocity_consensus_error = 0.0;
  std::optional<double> final_mean_intragroup_distance;
  double final_mean_speed = 0.0;
  double max_displacement = 0.0;
};

/// Normal-approximation confidence interval of the mean.
struct MeanInterval {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Two-sided normal quantile for 99% coverage.
inline constexpr double kZ99 = 2.5758293035489004;

MeanInterval mean_interval(std::span<const double> values, double z = kZ99);

struct AggregateRow {
  std::string cell;
  Controller controller = Controller::grf;
  int runs = 0;
  MeanInterval final_cluster_count;
  MeanInterval min_cluster_count;
  MeanInterval convergence_tick;
};

class BatchError : public std::runtime_error {
 public:
  BatchError(const std::string& cell, Controller controller, std::uint64_t seed,
             const std::string& what);
};

/// Runs every cell x controller x seed. A given seed yields the same initial
/// state under every controller. Rows come back in (cell, controller, seed)
/// order regardless of `workers`.
std::vector<BatchRow> run_batch(const nlohmann::json& scenario, std::span<const BatchCell> cells,
                                std::span<const std::uint64_t> seeds,
                                std::span<const Controller> controllers, int workers = 1);

/// Groups rows by (cell, controller) in first-appearance order.
std::vector<AggregateRow> aggregate(std::span<const BatchRow> rows);

std::string runs_csv(std::span<const BatchRow> rows);
std::string aggregate_csv(std::span<const AggregateRow> rows);

/// Worker count from GRF_WORKERS, or 1.
int default_workers();

}  // namespace grf
