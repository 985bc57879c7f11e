#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gmdiffuse/cli.hpp"
#include "gmdiffuse/io.hpp"
#include "gmdiffuse/rng.hpp"
#include "support.hpp"

using namespace gmdiffuse;
using namespace gmdiffuse::test;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gmdiffuse_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("CSV round trip is bit exact") {
  const auto dir = scratch_dir("csv");
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  PointSet p(200, 3);
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) << u(gen), u(gen) * 1e-300, 1.0 / 3.0;
  io::write_csv(dir / "p.csv", p);
  CHECK(io::read_csv(dir / "p.csv") == p);
  CHECK(slurp(dir / "p.csv").substr(0, 9) == "x0,x1,x2\n");

  io::write_csv(dir / "empty.csv", PointSet(0, 2));
  CHECK(slurp(dir / "empty.csv") == "x0,x1\n");
  CHECK(io::read_csv(dir / "empty.csv").rows() == 0);

  std::ofstream(dir / "bad.csv") << "x0,y1\n1,2\n";
  CHECK_THROWS_AS(io::read_csv(dir / "bad.csv"), io::FormatError);
  std::ofstream(dir / "short.csv") << "x0,x1\n1\n";
  CHECK_THROWS_AS(io::read_csv(dir / "short.csv"), io::FormatError);
}

TEST_CASE("mixture JSON") {
  const auto spec = from_means({{1.0, 2.0}, {-3.0, 0.1}});
  const auto back = io::mixture_from_json(io::to_json(spec));
  CHECK(back.n == 2);
  CHECK(back.means() == spec.means());
  CHECK(back.weights() == spec.weights());
  CHECK(back.locality.k == 2);

  json j = io::to_json(spec);
  j["components"][0].erase("weight");
  try {
    io::mixture_from_json(j);
    FAIL("expected a format error");
  } catch (const io::FormatError& e) {
    CHECK(std::string(e.what()).find("mixture.components[0].weight") != std::string::npos);
  }
}

TEST_CASE("score model JSON round trip is bit exact") {
  const auto spec = from_means({{0.0, 0.0}, {5.0, 1.0}});
  WarmStartSet ws;
  ws.centers = spec.means();
  ws.radius = 2.5;
  ws.noise_level = 1.3;
  const auto ds = build_denoising_dataset(sample_mixture(spec, 3000, 1), 0.3, 1.0, ws, 2);
  const auto model = fit_piecewise(ds, ws, FeatureBasis(2, 3, ds.sigma_sq), 8.0);

  const json j = io::to_json(model);
  const auto back = io::score_model_from_json(json::parse(j.dump()));
  CHECK(back.sigma_sq() == model.sigma_sq());
  CHECK(back.degree() == model.degree());
  CHECK(back.centers().centers == model.centers().centers);
  for (std::size_t c = 0; c < model.blocks().size(); ++c) CHECK(back.blocks()[c] == model.blocks()[c]);
  const Vector y = vec({0.7, -0.2});
  CHECK(back.score(y) == model.score(y));
}

TEST_CASE("trained stack directory round trip") {
  const auto dir = scratch_dir("stack");
  const auto spec = symmetric_pair(3.0);
  MixtureSampleSource source(spec, 1);
  TrainConfig cfg;
  cfg.eps = 0.5;
  cfg.samples_per_level = 500;
  cfg.locality = spec.locality;
  const auto stack = train(source, cfg);
  io::save_stack(dir, stack);
  CHECK(fs::exists(dir / "schedule.json"));
  CHECK(fs::exists(dir / "warmstarts.json"));
  CHECK(fs::exists(dir / "audit.jsonl"));
  CHECK(fs::exists(dir / "models" / "level_2.json"));

  const auto back = io::load_stack(dir);
  CHECK(back.schedule.times == stack.schedule.times);
  CHECK(back.models.size() == stack.models.size());
  CHECK(back.audit.size() == stack.audit.size());
  CHECK(back.warm_start_history.size() == stack.warm_start_history.size());
  CHECK(generate(back.score_stack(), back.schedule, 50, 3) == generate(stack.score_stack(), stack.schedule, 50, 3));
}

TEST_CASE("config parsing") {
  using cli::parse_config;
  const auto plain = parse_config("train", json(nullptr), json{{"out", "x"}});
  CHECK(plain.train.eps == 0.3);
  CHECK(plain.train.degree == 4);
  CHECK(plain.resolved["out"] == "x");

  try {
    parse_config("train", json{{"sgima0", 1.0}}, json::object());
    FAIL("expected a config error");
  } catch (const cli::ConfigError& e) {
    CHECK(std::string(e.what()).find("sgima0") != std::string::npos);
  }
  try {
    parse_config("train", json{{"warm_start", {{"radius", 1.0}}}}, json::object());
    FAIL("expected a config error");
  } catch (const cli::ConfigError& e) {
    CHECK(std::string(e.what()).find("warm_start.radius") != std::string::npos);
  }
  try {
    parse_config("train", json{{"eps", "small"}}, json::object());
    FAIL("expected a config error");
  } catch (const cli::ConfigError& e) {
    CHECK(std::string(e.what()).find("'eps'") != std::string::npos);
  }

  const auto over = parse_config("train", json{{"eps", 0.5}}, json{{"eps", 0.3}});
  CHECK(over.train.eps == 0.3);
  CHECK(over.resolved["eps"] == 0.3);
  CHECK_THROWS_AS(parse_config("bake", json(nullptr), json::object()), cli::ConfigError);
}

TEST_CASE("command dispatch") {
  const auto dir = scratch_dir("cli");
  const auto spec = from_means({{0.0, 0.0}, {10.0, 0.0}, {5.0, 8.66}});
  io::write_json(dir / "mix.json", io::to_json(spec));

  auto run = [&](const std::string& cmd, json overrides) {
    return cli::dispatch(cli::parse_config(cmd, json(nullptr), overrides));
  };

  SUBCASE("gen-mixture with zero count writes a header-only CSV") {
    const auto out = dir / "g0";
    CHECK(run("gen-mixture", {{"mixture", (dir / "mix.json").string()}, {"count", 0}, {"out", out.string()}}) == 0);
    CHECK(slurp(out / "samples.csv") == "x0,x1\n");
    CHECK(fs::exists(out / "config.json"));
    const json manifest = io::read_json(out / "manifest.json");
    CHECK(manifest["inputs"][0]["sha256"] == cli::sha256_file(dir / "mix.json"));
  }
  SUBCASE("identical runs give identical bytes") {
    for (const char* name : {"r1", "r2"}) {
      CHECK(run("gen-mixture", {{"mixture", (dir / "mix.json").string()}, {"count", 500}, {"seed", 9},
                                {"out", (dir / name).string()}}) == 0);
    }
    CHECK(slurp(dir / "r1" / "samples.csv") == slurp(dir / "r2" / "samples.csv"));
  }
  SUBCASE("sampling from a missing model directory fails with an error file") {
    const auto out = dir / "s";
    CHECK(run("sample", {{"model_dir", (dir / "nope").string()}, {"out", out.string()}}) != 0);
    const json err = io::read_json(out / "error.json");
    CHECK(err["status"] == "error");
    CHECK(err["command"] == "sample");
  }
  SUBCASE("missing output directory is a config error") {
    CHECK(run("gen-mixture", {{"mixture", (dir / "mix.json").string()}}) == 2);
  }
  SUBCASE("train, sample and eval produce metrics") {
    const auto model = dir / "model";
    CHECK(run("train", {{"mixture", (dir / "mix.json").string()}, {"eps", 0.5}, {"samples_per_level", 1000},
                        {"warm_start", {{"radius_const", 1.0}}}, {"out", model.string()}}) == 0);
    CHECK(run("sample", {{"model_dir", model.string()}, {"count", 500}, {"out", (dir / "gen").string()}}) == 0);
    CHECK(fs::exists(dir / "gen" / "samples.json"));
    CHECK(run("eval", {{"mixture", (dir / "mix.json").string()},
                       {"model_dir", model.string()},
                       {"samples", (dir / "gen" / "samples.csv").string()},
                       {"mc_count", 200},
                       {"eval_levels", 3},
                       {"count", 500},
                       {"out", (dir / "ev").string()}}) == 0);
    const json metrics = io::read_json(dir / "ev" / "metrics.json");
    CHECK(metrics.contains("score_errors"));
    CHECK(metrics["sample_quality"]["clusters"].size() == 3);
    CHECK(metrics["warm_start_cover"]["means"].size() == 3);
  }
  SUBCASE("spectrum writes JSON and CSV") {
    const auto pair = symmetric_pair(1.0);
    io::write_json(dir / "pair.json", io::to_json(pair));
    CHECK(run("spectrum", {{"mixture", (dir / "pair.json").string()},
                           {"spectrum", {{"d_max", 12}}},
                           {"out", (dir / "sp").string()}}) == 0);
    const json rep = io::read_json(dir / "sp" / "spectrum.json");
    CHECK(rep["tails"].size() == 14);
    CHECK(slurp(dir / "sp" / "spectrum.csv").rfind("degree,tail\n", 0) == 0);
  }
}
