#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "capsim/calibration.hpp"
#include "capsim/simulation.hpp"

namespace capsim {

/// Everything a configuration file can hold: the simulation plus an optional fit section.
struct RunConfig {
  SimulationConfig simulation;
  std::optional<FitSettings> fit;

  bool operator==(const RunConfig&) const = default;
};

/**
 * YAML configuration. Unknown keys are errors. An erosion `file:` is resolved against
 * `base_dir` and loaded inline. The result is validated; ConfigError carries the offending
 * line, ValidationError lists every invariant violation.
 */
/// `adjust` runs on the parsed simulation before validation, e.g. to apply command-line overrides.
using ConfigAdjust = std::function<void(SimulationConfig&)>;

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {},
                       const ConfigAdjust& adjust = {});
RunConfig load_config(const std::filesystem::path& path, const ConfigAdjust& adjust = {});

/// Canonical text with round-trip exact numbers; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

}  // namespace capsim
