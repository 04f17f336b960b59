#pragma once

// Scenario files: a JSON tree mapping one-to-one onto SwarmConfig. Unknown
// keys are rejected. See README.md for the schema.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "grf/model.hpp"

namespace grf {

/// Reads and parses a scenario file; a missing or malformed file is a
/// ConfigError.
nlohmann::json read_scenario_file(const std::filesystem::path& path);

/// Applies `dotted.key=value` to the tree. `value` is parsed as JSON when
/// possible and taken as a string otherwise. The keys `group_count` and
/// `group_size` rewrite the `groups` array.
void apply_override(nlohmann::json& tree, std::string_view assignment);

/// Builds and validates a configuration, filling defaults. Every unknown key
/// and every invariant violation is reported in one ConfigError.
SwarmConfig parse_config(const nlohmann::json& tree);

/// Fully resolved configuration; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const SwarmConfig& config);

/// 64-bit FNV-1a of the resolved configuration, as 16 hex digits.
std::string config_hash(const SwarmConfig& config);

SwarmConfig load_scenario(const std::filesystem::path& path,
                          std::span<const std::string> overrides = {});

}  // namespace grf
