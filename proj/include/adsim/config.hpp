#pragma once

// JSON configuration: scenario serialization with hardware-table defaults,
// strict validation with path-qualified errors, the bundled structural
// schema, deterministic config hashing and the run manifest.

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "adsim/sim.hpp"

namespace adsim {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

nlohmann::json spec_to_json(const ScenarioSpec& spec);

/// Strict parse: every key must be known, every constrained field checked,
/// errors carry the offending JSON path. A "scenario" key selects the
/// built-in baseline that the remaining keys override; an empty object is the
/// default single-converter black start.
ScenarioSpec spec_from_json(const nlohmann::json& doc);

/// Read and parse a config file (see spec_from_json).
ScenarioSpec load_config(const std::string& path);

/// FNV-1a 64-bit hash over the canonical (sorted-key) serialization.
std::string config_hash(const nlohmann::json& doc);

/// Structural schema for config documents (subset of JSON Schema: type,
/// properties, required, items, additionalProperties).
nlohmann::json config_schema();

/// Structural schema for exported trace JSON files.
nlohmann::json trace_schema();

/// Validate `doc` against a structural schema; throws ConfigError with the
/// offending path.
void validate_against_schema(const nlohmann::json& schema, const nlohmann::json& doc,
                             const std::string& path = "$");

/// Run manifest: scenario id, config hash, tool version, wall-clock times
/// (ISO 8601) and output paths.
nlohmann::json run_manifest(const std::string& scenario, const std::string& cfg_hash,
                            const std::string& started_iso, const std::string& finished_iso,
                            const std::vector<std::string>& outputs);

/// Current UTC time as an ISO-8601 string.
std::string iso8601_now();

}  // namespace adsim
