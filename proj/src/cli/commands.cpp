#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <omp.h>
#include <openssl/evp.h>

#include "gmdiffuse/cli.hpp"
#include "gmdiffuse/diagnostics.hpp"
#include "gmdiffuse/io.hpp"
#include "gmdiffuse/logging.hpp"
#include "gmdiffuse/rng.hpp"

namespace gmdiffuse::cli {
namespace {

namespace fs = std::filesystem;

// Files produced by a command, relative to the output directory.
struct Run {
  const RunConfig& cfg;
  json resolved;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  json summary = json::object();
};

fs::path require_path(const fs::path& p, const std::string& key) {
  if (p.empty()) throw ConfigError("missing required key '" + key + "'");
  if (!fs::exists(p)) throw ConfigError(key + " not found: " + p.string());
  return p;
}

MixtureSpec load_mixture(Run& run) {
  const fs::path p = require_path(run.cfg.mixture, "mixture");
  run.inputs.push_back(p);
  return io::mixture_from_json(io::read_json(p));
}

void write_output_json(Run& run, const std::string& name, const json& j) {
  io::write_json(run.cfg.out / name, j);
  run.outputs.emplace_back(name);
}

void write_output_csv(Run& run, const std::string& name, const PointSet& pts) {
  io::write_csv(run.cfg.out / name, pts);
  run.outputs.emplace_back(name);
}

void gen_mixture(Run& run) {
  const MixtureSpec spec = load_mixture(run);
  const PointSet pts = sample_mixture(spec, run.cfg.count, run.cfg.seed);
  write_output_csv(run, "samples.csv", pts);
  run.summary["count"] = pts.rows();
}

void train_cmd(Run& run) {
  const RunConfig& cfg = run.cfg;
  TrainConfig t = cfg.train;
  std::optional<MixtureSpec> spec;
  if (!cfg.mixture.empty()) spec = load_mixture(run);

  const json& loc = run.resolved["locality"];
  if (spec) {
    if (run.resolved["sigma0_sq"].is_null()) t.sigma0_sq = spec->sigma0_sq;
    KLocalityParams base = spec->locality;
    if (!loc["R0"].is_null()) base.R0 = t.locality.R0;
    if (!loc["alpha_min"].is_null()) base.alpha_min = t.locality.alpha_min;
    if (!loc["D"].is_null()) base.D = t.locality.D;
    if (!loc["k"].is_null()) base.k = t.locality.k;
    t.locality = base;
  }
  run.resolved["sigma0_sq"] = t.sigma0_sq;
  run.resolved["locality"] = {{"R0", t.locality.R0}, {"alpha_min", t.locality.alpha_min},
                              {"D", t.locality.D}, {"k", t.locality.k}};

  std::unique_ptr<SampleSource> source;
  if (!cfg.samples.empty()) {
    const fs::path p = require_path(cfg.samples, "samples");
    run.inputs.push_back(p);
    source = std::make_unique<TableSampleSource>(io::read_csv(p));
  } else if (spec) {
    source = std::make_unique<MixtureSampleSource>(*spec, derive_seed(cfg.seed, 0x5a));
  } else {
    throw ConfigError("train needs 'samples' or 'mixture'");
  }

  const TrainedStack stack = train(*source, t);
  io::save_stack(cfg.out, stack);
  run.outputs.emplace_back("schedule.json");
  run.outputs.emplace_back("stack.json");
  run.outputs.emplace_back("warmstarts.json");
  run.outputs.emplace_back("audit.jsonl");
  for (const auto& [level, model] : stack.models) {
    run.outputs.push_back(fs::path("models") / ("level_" + std::to_string(level) + ".json"));
  }
  run.summary["levels"] = stack.schedule.size();
  run.summary["degree"] = stack.degree;
  run.summary["samples_consumed"] = source->consumed();
  run.summary["final_warm_starts"] = stack.final_warm_starts().size();
}

void sample_cmd(Run& run) {
  const RunConfig& cfg = run.cfg;
  if (cfg.model_dir.empty()) throw ConfigError("missing required key 'model_dir'");
  const TrainedStack stack = io::load_stack(cfg.model_dir);
  run.inputs.push_back(cfg.model_dir);
  const PointSet pts = generate(stack.score_stack(), stack.schedule, cfg.count, cfg.seed);
  write_output_csv(run, "samples.csv", pts);
  json models = json::object();
  for (const auto& [level, model] : stack.models) {
    const auto name = "level_" + std::to_string(level) + ".json";
    models[name] = sha256_file(cfg.model_dir / "models" / name);
  }
  write_output_json(run, "samples.json",
                    {{"seed", cfg.seed},
                     {"count", cfg.count},
                     {"schedule", io::to_json(stack.schedule)},
                     {"model_sha256", models}});
  run.summary["count"] = pts.rows();
}

void eval_cmd(Run& run) {
  const RunConfig& cfg = run.cfg;
  const MixtureSpec spec = load_mixture(run);
  json metrics = json::object();

  json loc = json::array();
  for (const auto& v : validate_k_locality(spec)) loc.push_back(v.detail);
  metrics["locality_violations"] = loc;

  if (!cfg.model_dir.empty()) {
    const TrainedStack stack = io::load_stack(cfg.model_dir);
    run.inputs.push_back(cfg.model_dir);
    const std::size_t N = stack.schedule.size();
    const std::size_t picks = std::min<std::size_t>(std::max<std::size_t>(cfg.eval_levels, 1), N - 1);
    std::vector<std::size_t> levels;
    for (std::size_t i = 0; i < picks; ++i) {
      const std::size_t l = 2 + (picks == 1 ? 0 : i * (N - 2) / (picks - 1));
      if (levels.empty() || levels.back() != l) levels.push_back(l);
    }
    json errors = json::array();
    double rel_sum = 0.0;
    for (std::size_t l : levels) {
      const auto rep = score_l2_error(*stack.models.at(l), spec, stack.schedule.time(l), cfg.mc_count,
                                      derive_seed(cfg.seed, l));
      json j = io::to_json(rep);
      j["level"] = l;
      errors.push_back(j);
      rel_sum += rep.relative();
    }
    metrics["score_errors"] = errors;
    metrics["mean_relative_score_error"] = rel_sum / static_cast<double>(levels.size());

    const WarmStartSet& ws = stack.final_warm_starts();
    json cover = json::array();
    for (const auto& c : spec.components) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < ws.centers.rows(); ++i) best = std::min(best, (point(ws.centers, i) - c.mean).norm());
      cover.push_back({{"distance", best}, {"covered", best <= ws.radius}});
    }
    metrics["warm_start_cover"] = {{"radius", ws.radius}, {"centers", ws.size()}, {"means", cover}};
    metrics["tv_bound_t1"] = tv_upper_bound(stack.schedule.times.front(), spec.sigma0_sq, spec.n);
  }

  if (!cfg.samples.empty()) {
    const fs::path gp = require_path(cfg.samples, "samples");
    run.inputs.push_back(gp);
    const PointSet gen = io::read_csv(gp);
    PointSet ref;
    if (!cfg.reference.empty()) {
      const fs::path rp = require_path(cfg.reference, "reference");
      run.inputs.push_back(rp);
      ref = io::read_csv(rp);
    } else {
      ref = sample_mixture(spec, std::max<std::size_t>(cfg.count, 1), derive_seed(cfg.seed, 0xe7));
    }
    metrics["sample_quality"] =
        io::to_json(sample_quality_metrics(gen, ref, spec.means(), cfg.seed, cfg.directions));
  }
  write_output_json(run, "metrics.json", metrics);
}

void spectrum_cmd(Run& run) {
  const RunConfig& cfg = run.cfg;
  const MixtureSpec spec = load_mixture(run);
  Vector center = Vector::Zero(spec.n);
  if (!cfg.spectrum_center.empty()) {
    if (static_cast<int>(cfg.spectrum_center.size()) != spec.n) {
      throw ConfigError("key 'spectrum.center': expected " + std::to_string(spec.n) + " entries");
    }
    center = Eigen::Map<const Vector>(cfg.spectrum_center.data(), spec.n);
  }
  const auto rep = hermite_coefficient_spectrum(spec, cfg.spectrum_sigma_sq, center, cfg.d_max, cfg.nodes);
  write_output_json(run, "spectrum.json", io::to_json(rep));
  io::write_spectrum_csv(cfg.out / "spectrum.csv", rep);
  run.outputs.emplace_back("spectrum.csv");
}

json hash_entry(const fs::path& p, const fs::path& shown) {
  return {{"path", shown.generic_string()}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}};
}

json manifest(const Run& run) {
  json inputs = json::array();
  for (const auto& p : run.inputs) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file()) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) inputs.push_back(hash_entry(f, f));
    } else {
      inputs.push_back(hash_entry(p, p));
    }
  }
  json outputs = json::array();
  for (const auto& p : run.outputs) outputs.push_back(hash_entry(run.cfg.out / p, p));
  return {{"command", run.cfg.command}, {"inputs", inputs}, {"outputs", outputs}};
}

void report_error(const RunConfig& cfg, const std::string& kind, const std::string& message) {
  const json err = {{"status", "error"}, {"command", cfg.command}, {"kind", kind}, {"message", message}};
  std::cout << err.dump() << std::endl;
  if (!cfg.out.empty()) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (!ec) {
      std::ofstream f(cfg.out / "error.json");
      f << err.dump(2) << '\n';
    }
  }
}

}  // namespace

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

int dispatch(const RunConfig& cfg) {
  try {
    if (cfg.out.empty()) throw ConfigError("missing required key 'out'");
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    fs::create_directories(cfg.out);
    Run run{cfg, cfg.resolved, {}, {}};
    if (cfg.command == "gen-mixture") {
      gen_mixture(run);
    } else if (cfg.command == "train") {
      train_cmd(run);
    } else if (cfg.command == "sample") {
      sample_cmd(run);
    } else if (cfg.command == "eval") {
      eval_cmd(run);
    } else if (cfg.command == "spectrum") {
      spectrum_cmd(run);
    } else {
      throw ConfigError("unknown command '" + cfg.command + "'");
    }
    io::write_json(cfg.out / "config.json", run.resolved);
    run.outputs.emplace_back("config.json");
    io::write_json(cfg.out / "manifest.json", manifest(run));
    json ok = {{"status", "ok"}, {"command", cfg.command}, {"out", cfg.out.string()}, {"summary", run.summary}};
    std::cout << ok.dump() << std::endl;
    return 0;
  } catch (const ConfigError& e) {
    report_error(cfg, "config", e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error(cfg, "runtime", e.what());
    return 1;
  }
}

}  // namespace gmdiffuse::cli
