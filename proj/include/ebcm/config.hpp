#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ebcm/acquisition.hpp"

namespace ebcm {

/// Complete description of a batch job. JSON keys mirror the field names;
/// every key is optional and unknown keys are rejected.
struct RunConfig {
  ExperimentConfig experiment;
  int replicas = 20;
  std::vector<double> alpha_grid{0.5, 0.9, 0.98, 0.99, 0.999};
  std::uint64_t reference_seed = 7;
  int switch_block = 10;
  /// Uncounted photons each EBCM prediction replica runs before its first
  /// phase point, so predictions start from a trained device.
  std::int64_t prediction_burn_in = 20000;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Parses and validates a config object. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

/// Loads a config file. A metadata sidecar written by a previous run is
/// accepted too; its embedded config is used. Throws IoError when the file
/// cannot be read and ConfigError when its content is invalid.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace ebcm
