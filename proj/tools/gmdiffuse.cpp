#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gmdiffuse/cli.hpp"
#include "gmdiffuse/logging.hpp"

namespace {

using gmdiffuse::cli::json;

template <typename T>
void add_override(CLI::App& app, json& overrides, const std::string& flag, const std::string& key,
                  const std::string& help) {
  app.add_option_function<T>(flag, [&overrides, key](const T& v) { overrides[key] = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  gmdiffuse::log::configure_from_env();

  CLI::App app{"Score-based sampling for Gaussian mixtures: train, sample, evaluate."};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  json overrides = json::object();
  json spectrum = json::object();

  app.add_option("--config", config_path, "JSON config file");
  add_override<std::string>(app, overrides, "--out", "out", "Output directory");
  add_override<std::uint64_t>(app, overrides, "--seed", "seed", "Global seed");
  add_override<double>(app, overrides, "--eps", "eps", "Target accuracy in (0, 1/2]");
  add_override<double>(app, overrides, "--delta", "delta", "Failure probability");
  add_override<std::uint64_t>(app, overrides, "--degree", "degree", "Polynomial degree cap");
  add_override<std::uint64_t>(app, overrides, "--samples-per-level", "samples_per_level",
                              "Regression samples per level");
  add_override<std::uint64_t>(app, overrides, "--count", "count", "Number of samples to produce");
  add_override<std::uint64_t>(app, overrides, "--threads", "threads", "Worker thread cap (0: default)");
  add_override<std::string>(app, overrides, "--mixture", "mixture", "Mixture JSON");
  add_override<std::string>(app, overrides, "--samples", "samples", "Sample CSV");
  add_override<std::string>(app, overrides, "--model-dir", "model_dir", "Trained model directory");
  add_override<std::string>(app, overrides, "--reference", "reference", "Reference sample CSV for eval");
  add_override<std::uint64_t>(app, overrides, "--mc-count", "mc_count", "Monte-Carlo draws per score check");
  app.add_option_function<double>("--sigma-sq", [&](const double& v) { spectrum["sigma_sq"] = v; },
                                  "Spectrum noise level");
  app.add_option_function<std::uint64_t>("--d-max", [&](const std::uint64_t& v) { spectrum["d_max"] = v; },
                                         "Spectrum maximal degree");

  for (const auto& name : gmdiffuse::cli::kCommands) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (!spectrum.empty()) overrides["spectrum"] = spectrum;

  const std::string command = app.get_subcommands().front()->get_name();
  gmdiffuse::cli::RunConfig cfg;
  try {
    std::optional<std::filesystem::path> path;
    if (config_path) path = *config_path;
    cfg = gmdiffuse::cli::parse_config(command, path, overrides);
  } catch (const std::exception& e) {
    const json err = {{"status", "error"}, {"command", command}, {"kind", "config"}, {"message", e.what()}};
    std::cout << err.dump() << std::endl;
    return 2;
  }
  return gmdiffuse::cli::dispatch(cfg);
}
