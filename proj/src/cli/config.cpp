#include <algorithm>
#include <fstream>

#include "gmdiffuse/cli.hpp"

namespace gmdiffuse::cli {
namespace {

// Leaf type tags; objects in the schema describe nested sections.
json schema() {
  return {
      {"out", "string"},
      {"seed", "uint"},
      {"threads", "uint"},
      {"mixture", "string"},
      {"samples", "string"},
      {"model_dir", "string"},
      {"reference", "string"},
      {"count", "uint"},
      {"eps", "number"},
      {"delta", "number"},
      {"degree", "uint"},
      {"samples_per_level", "uint"},
      {"warm_start_samples", "uint"},
      {"m2_samples", "uint"},
      {"sigma0_sq", "number?"},
      {"norm_bound", "number?"},
      {"M2", "number?"},
      {"basis_cap", "uint"},
      {"warm_start", {{"radius_const", "number"}, {"rounds_const", "number"}, {"sample_const", "number"}}},
      {"locality", {{"R0", "number?"}, {"alpha_min", "number?"}, {"D", "number?"}, {"k", "uint?"}}},
      {"mc_count", "uint"},
      {"eval_levels", "uint"},
      {"directions", "uint"},
      {"spectrum", {{"sigma_sq", "number"}, {"center", "number[]"}, {"d_max", "uint"}, {"nodes", "uint"}}},
  };
}

bool matches(const std::string& tag, const json& v) {
  std::string base = tag;
  if (base.back() == '?') {
    if (v.is_null()) return true;
    base.pop_back();
  }
  if (base == "string") return v.is_string();
  if (base == "uint") return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (base == "number") return v.is_number();
  if (base == "number[]") {
    return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
  }
  return false;
}

void merge(const json& sch, json& target, const json& src, const std::string& path) {
  if (src.is_null()) return;
  if (!src.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected an object");
  for (const auto& [key, value] : src.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!sch.contains(key)) throw ConfigError("unknown key '" + here + "'");
    const json& s = sch[key];
    if (s.is_object()) {
      merge(s, target[key], value, here);
    } else {
      const auto tag = s.get<std::string>();
      if (!matches(tag, value)) {
        throw ConfigError("key '" + here + "': expected " + tag + ", got " + value.type_name());
      }
      target[key] = value;
    }
  }
}

}  // namespace

json default_config() {
  TrainConfig t;
  return {
      {"out", ""},
      {"seed", 0},
      {"threads", 0},
      {"mixture", ""},
      {"samples", ""},
      {"model_dir", ""},
      {"reference", ""},
      {"count", 10000},
      {"eps", t.eps},
      {"delta", t.delta},
      {"degree", t.degree},
      {"samples_per_level", t.samples_per_level},
      {"warm_start_samples", t.warm_start_samples},
      {"m2_samples", t.m2_samples},
      {"sigma0_sq", nullptr},
      {"norm_bound", nullptr},
      {"M2", nullptr},
      {"basis_cap", t.basis_cap},
      {"warm_start",
       {{"radius_const", t.warm_start.radius_const},
        {"rounds_const", t.warm_start.rounds_const},
        {"sample_const", t.warm_start.sample_const}}},
      {"locality", {{"R0", nullptr}, {"alpha_min", nullptr}, {"D", nullptr}, {"k", nullptr}}},
      {"mc_count", 4000},
      {"eval_levels", 8},
      {"directions", 64},
      {"spectrum", {{"sigma_sq", 1.0}, {"center", json::array()}, {"d_max", 20}, {"nodes", 0}}},
  };
}

RunConfig parse_config(const std::string& command, const json& file, const json& overrides) {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    throw ConfigError("unknown command '" + command + "'");
  }
  const json sch = schema();
  json r = default_config();
  merge(sch, r, file, "");
  merge(sch, r, overrides, "");

  RunConfig c;
  c.command = command;
  c.out = r["out"].get<std::string>();
  c.seed = r["seed"].get<std::uint64_t>();
  c.threads = r["threads"].get<int>();
  c.mixture = r["mixture"].get<std::string>();
  c.samples = r["samples"].get<std::string>();
  c.model_dir = r["model_dir"].get<std::string>();
  c.reference = r["reference"].get<std::string>();
  c.count = r["count"].get<std::size_t>();

  TrainConfig& t = c.train;
  t.eps = r["eps"].get<double>();
  t.delta = r["delta"].get<double>();
  t.degree = r["degree"].get<int>();
  t.samples_per_level = r["samples_per_level"].get<std::size_t>();
  t.warm_start_samples = r["warm_start_samples"].get<std::size_t>();
  t.m2_samples = r["m2_samples"].get<std::size_t>();
  t.seed = c.seed;
  if (!r["sigma0_sq"].is_null()) t.sigma0_sq = r["sigma0_sq"].get<double>();
  if (!r["norm_bound"].is_null()) t.norm_bound = r["norm_bound"].get<double>();
  if (!r["M2"].is_null()) t.M2 = r["M2"].get<double>();
  t.basis_cap = r["basis_cap"].get<std::size_t>();
  t.warm_start.radius_const = r["warm_start"]["radius_const"].get<double>();
  t.warm_start.rounds_const = r["warm_start"]["rounds_const"].get<double>();
  t.warm_start.sample_const = r["warm_start"]["sample_const"].get<double>();
  const json& loc = r["locality"];
  if (!loc["R0"].is_null()) t.locality.R0 = loc["R0"].get<double>();
  if (!loc["alpha_min"].is_null()) t.locality.alpha_min = loc["alpha_min"].get<double>();
  if (!loc["D"].is_null()) t.locality.D = loc["D"].get<double>();
  if (!loc["k"].is_null()) t.locality.k = loc["k"].get<int>();
  c.locality_from_config = std::any_of(loc.begin(), loc.end(), [](const json& v) { return !v.is_null(); });

  c.mc_count = r["mc_count"].get<std::size_t>();
  c.eval_levels = r["eval_levels"].get<std::size_t>();
  c.directions = r["directions"].get<int>();
  c.spectrum_sigma_sq = r["spectrum"]["sigma_sq"].get<double>();
  c.spectrum_center = r["spectrum"]["center"].get<std::vector<double>>();
  c.d_max = r["spectrum"]["d_max"].get<int>();
  c.nodes = r["spectrum"]["nodes"].get<int>();

  r["command"] = command;
  c.resolved = std::move(r);
  return c;
}

RunConfig parse_config(const std::string& command, const std::optional<std::filesystem::path>& path,
                       const json& overrides) {
  json file;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("config file not found: " + path->string());
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file " + path->string() + " is not valid JSON: " + e.what());
    }
  }
  return parse_config(command, file, overrides);
}

}  // namespace gmdiffuse::cli
