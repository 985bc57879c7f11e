#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gmdiffuse/diagnostics.hpp"
#include "gmdiffuse/mixture_model.hpp"
#include "gmdiffuse/noise_schedule.hpp"
#include "gmdiffuse/pipeline.hpp"
#include "gmdiffuse/score_regression.hpp"
#include "gmdiffuse/warm_starts.hpp"

namespace gmdiffuse::io {

using nlohmann::json;

/// Raised for malformed files; the message names the offending key path.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(const MixtureSpec& spec);
MixtureSpec mixture_from_json(const json& j);

json to_json(const NoiseSchedule& schedule);
NoiseSchedule schedule_from_json(const json& j);

json to_json(const WarmStartSet& set);
WarmStartSet warm_starts_from_json(const json& j);

json to_json(const PiecewiseScoreModel& model);
PiecewiseScoreModel score_model_from_json(const json& j);

json to_json(const LevelAudit& audit);
json to_json(const ScoreErrorReport& report);
json to_json(const SampleQuality& quality);
json to_json(const SpectrumReport& report);

/// CSV with header x0,...,x{n-1} and 17 significant digits per value.
void write_csv(const std::filesystem::path& path, const PointSet& points);
/// Reads a CSV written by write_csv. `n` is taken from the header.
PointSet read_csv(const std::filesystem::path& path);

/// Plot-ready (degree, tail) table.
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumReport& report);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

/// Directory layout: schedule.json, models/level_<l>.json, warmstarts.json,
/// audit.jsonl and stack.json (scalar metadata).
void save_stack(const std::filesystem::path& dir, const TrainedStack& stack);
TrainedStack load_stack(const std::filesystem::path& dir);

}  // namespace gmdiffuse::io
