#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmdiffuse/pipeline.hpp"

namespace gmdiffuse::cli {

using nlohmann::json;

inline const std::vector<std::string> kCommands = {"gen-mixture", "train", "sample", "eval", "spectrum"};

/// Invalid configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 keeps the OpenMP default

  std::filesystem::path mixture;    // mixture JSON
  std::filesystem::path samples;    // P_0 samples (train) or generated samples (eval)
  std::filesystem::path model_dir;  // trained stack
  std::filesystem::path reference;  // reference samples for eval
  std::size_t count = 10000;

  TrainConfig train;
  bool locality_from_config = false;

  // eval
  std::size_t mc_count = 4000;
  std::size_t eval_levels = 8;
  int directions = 64;

  // spectrum
  double spectrum_sigma_sq = 1.0;
  std::vector<double> spectrum_center;  // empty: origin
  int d_max = 20;
  int nodes = 0;  // 0: default rule

  /// Fully resolved values, as echoed into the output directory.
  json resolved;
};

/// Default values for every recognised key.
json default_config();

/// Merges `file` (may be null) and `overrides` into the defaults. Unknown
/// keys and type mismatches raise ConfigError naming the key path.
RunConfig parse_config(const std::string& command, const json& file, const json& overrides);

/// Reads a JSON config file (TOML is not supported) and calls the above.
RunConfig parse_config(const std::string& command, const std::optional<std::filesystem::path>& path,
                       const json& overrides);

/// Runs the command and returns the process exit status. On failure a
/// {"status":"error",...} object is printed to stdout (and written to
/// <out>/error.json when possible).
int dispatch(const RunConfig& cfg);

/// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace gmdiffuse::cli
