#include "gmdiffuse/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gmdiffuse::io {
namespace {

namespace fs = std::filesystem;

const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw FormatError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(path + "." + key + ": missing");
  return *it;
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& path) {
  const json& v = member(j, key, path);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw FormatError(path + "." + key + ": wrong type (" + v.type_name() + ")");
  }
}

json points_to_json(const PointSet& p) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    rows.push_back(std::vector<double>(p.row(i).begin(), p.row(i).end()));
  }
  return rows;
}

PointSet points_from_json(const json& j, int n, const std::string& path) {
  if (!j.is_array()) throw FormatError(path + ": expected an array of points");
  PointSet p(static_cast<Eigen::Index>(j.size()), n);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string here = path + "[" + std::to_string(i) + "]";
    std::vector<double> row;
    try {
      row = j[i].get<std::vector<double>>();
    } catch (const json::exception&) {
      throw FormatError(here + ": expected an array of numbers");
    }
    if (static_cast<int>(row.size()) != n) throw FormatError(here + ": wrong dimension");
    for (int c = 0; c < n; ++c) p(static_cast<Eigen::Index>(i), c) = row[static_cast<std::size_t>(c)];
  }
  return p;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json to_json(const MixtureSpec& spec) {
  json comps = json::array();
  for (const auto& c : spec.components) {
    comps.push_back({{"mean", std::vector<double>(c.mean.begin(), c.mean.end())}, {"weight", c.weight}});
  }
  return {{"n", spec.n},
          {"sigma0_sq", spec.sigma0_sq},
          {"components", comps},
          {"locality",
           {{"R0", spec.locality.R0},
            {"alpha_min", spec.locality.alpha_min},
            {"D", spec.locality.D},
            {"k", spec.locality.k}}}};
}

MixtureSpec mixture_from_json(const json& j) {
  MixtureSpec spec;
  spec.n = get<int>(j, "n", "mixture");
  spec.sigma0_sq = get<double>(j, "sigma0_sq", "mixture");
  const json& comps = member(j, "components", "mixture");
  if (!comps.is_array()) throw FormatError("mixture.components: expected an array");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string path = "mixture.components[" + std::to_string(i) + "]";
    const auto mean = get<std::vector<double>>(comps[i], "mean", path);
    Component c;
    c.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    c.weight = get<double>(comps[i], "weight", path);
    spec.components.push_back(std::move(c));
  }
  if (j.contains("locality")) {
    const json& loc = j["locality"];
    spec.locality.R0 = get<double>(loc, "R0", "mixture.locality");
    spec.locality.alpha_min = get<double>(loc, "alpha_min", "mixture.locality");
    spec.locality.D = get<double>(loc, "D", "mixture.locality");
    spec.locality.k = get<int>(loc, "k", "mixture.locality");
  }
  spec.validate();
  return spec;
}

json to_json(const NoiseSchedule& s) {
  return {{"times", s.times}, {"kappa", s.kappa}, {"T", s.T},      {"eps", s.eps},
          {"M2", s.M2},       {"n", s.n},         {"eps_budgets", s.eps_budgets}};
}

NoiseSchedule schedule_from_json(const json& j) {
  NoiseSchedule s;
  s.times = get<std::vector<double>>(j, "times", "schedule");
  s.kappa = get<double>(j, "kappa", "schedule");
  s.T = get<double>(j, "T", "schedule");
  s.eps = get<double>(j, "eps", "schedule");
  s.M2 = get<double>(j, "M2", "schedule");
  s.n = get<int>(j, "n", "schedule");
  s.eps_budgets = get<std::vector<double>>(j, "eps_budgets", "schedule");
  check_times(s.times);
  return s;
}

json to_json(const WarmStartSet& set) {
  return {{"n", set.centers.cols()},
          {"radius", set.radius},
          {"noise_level", set.noise_level},
          {"centers", points_to_json(set.centers)}};
}

WarmStartSet warm_starts_from_json(const json& j) {
  WarmStartSet set;
  const int n = get<int>(j, "n", "warm_starts");
  set.radius = get<double>(j, "radius", "warm_starts");
  set.noise_level = get<double>(j, "noise_level", "warm_starts");
  set.centers = points_from_json(member(j, "centers", "warm_starts"), n, "warm_starts.centers");
  set.validate();
  return set;
}

json to_json(const PiecewiseScoreModel& model) {
  json blocks = json::array();
  for (std::size_t c = 0; c < model.blocks().size(); ++c) {
    const Matrix& b = model.blocks()[c];
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(b.size()));
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      for (Eigen::Index k = 0; k < b.cols(); ++k) flat.push_back(b(r, k));
    }
    blocks.push_back({{"cell", c}, {"coeffs", std::move(flat)}});
  }
  return {{"sigma_sq", model.sigma_sq()},
          {"degree", model.degree()},
          {"norm_bound", model.norm_bound()},
          {"basis_size", model.basis().size()},
          {"n", model.dimension()},
          {"centers", points_to_json(model.centers().centers)},
          {"radius", model.centers().radius},
          {"noise_level", model.centers().noise_level},
          {"blocks", blocks}};
}

PiecewiseScoreModel score_model_from_json(const json& j) {
  const double sigma_sq = get<double>(j, "sigma_sq", "model");
  const int degree = get<int>(j, "degree", "model");
  const double norm_bound = get<double>(j, "norm_bound", "model");
  const auto p = get<std::size_t>(j, "basis_size", "model");
  WarmStartSet centers = warm_starts_from_json(j);
  const auto n = centers.centers.cols();
  const json& blocks = member(j, "blocks", "model");
  if (!blocks.is_array() || blocks.size() != centers.size()) {
    throw FormatError("model.blocks: expected one block per warm start");
  }
  std::vector<Matrix> mats(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string path = "model.blocks[" + std::to_string(i) + "]";
    const auto cell = get<std::size_t>(blocks[i], "cell", path);
    if (cell >= mats.size()) throw FormatError(path + ".cell: out of range");
    const auto flat = get<std::vector<double>>(blocks[i], "coeffs", path);
    if (flat.size() != static_cast<std::size_t>(n) * p) throw FormatError(path + ".coeffs: wrong length");
    Matrix b(n, static_cast<Eigen::Index>(p));
    std::size_t at = 0;
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      for (Eigen::Index k = 0; k < b.cols(); ++k) b(r, k) = flat[at++];
    }
    mats[cell] = std::move(b);
  }
  return PiecewiseScoreModel(std::move(centers), degree, sigma_sq, std::move(mats), norm_bound,
                             std::max<std::size_t>(p, kDefaultBasisCap));
}

json to_json(const LevelAudit& a) {
  return {{"level", a.level},
          {"t", a.t},
          {"sigma_sq", a.sigma_sq},
          {"cells", a.cells},
          {"cell_counts", a.cell_counts},
          {"cell_losses", a.cell_losses},
          {"constrained_cells", a.constrained_cells},
          {"loss", a.loss},
          {"regression_offset", a.regression_offset},
          {"regression_count", a.regression_count},
          {"refreshed", a.refreshed},
          {"refresh_offset", a.refresh_offset},
          {"refresh_count", a.refresh_count},
          {"refresh_residual", a.refresh_residual},
          {"refreshed_centers", a.refreshed_centers}};
}

namespace {

LevelAudit audit_from_json(const json& j) {
  LevelAudit a;
  const std::string p = "audit";
  a.level = get<std::size_t>(j, "level", p);
  a.t = get<double>(j, "t", p);
  a.sigma_sq = get<double>(j, "sigma_sq", p);
  a.cells = get<std::size_t>(j, "cells", p);
  a.cell_counts = get<std::vector<std::size_t>>(j, "cell_counts", p);
  a.cell_losses = get<std::vector<double>>(j, "cell_losses", p);
  a.constrained_cells = get<std::size_t>(j, "constrained_cells", p);
  a.loss = get<double>(j, "loss", p);
  a.regression_offset = get<std::size_t>(j, "regression_offset", p);
  a.regression_count = get<std::size_t>(j, "regression_count", p);
  a.refreshed = get<bool>(j, "refreshed", p);
  a.refresh_offset = get<std::size_t>(j, "refresh_offset", p);
  a.refresh_count = get<std::size_t>(j, "refresh_count", p);
  a.refresh_residual = get<std::size_t>(j, "refresh_residual", p);
  a.refreshed_centers = get<std::size_t>(j, "refreshed_centers", p);
  return a;
}

}  // namespace

json to_json(const ScoreErrorReport& r) {
  return {{"t", r.t},
          {"mc_count", r.mc_count},
          {"estimate", r.estimate},
          {"std_error", r.std_error},
          {"reference", r.reference},
          {"relative", r.relative()}};
}

json to_json(const SampleQuality& q) {
  json clusters = json::array();
  for (const auto& c : q.clusters) {
    clusters.push_back({{"generated_weight", c.generated_weight},
                        {"reference_weight", c.reference_weight},
                        {"weight_error", c.weight_error},
                        {"generated_mean", std::vector<double>(c.generated_mean.begin(), c.generated_mean.end())},
                        {"reference_mean", std::vector<double>(c.reference_mean.begin(), c.reference_mean.end())},
                        // JSON has no infinity; an empty side is reported as null.
                        {"mean_error", std::isfinite(c.mean_error) ? json(c.mean_error) : json(nullptr)}});
  }
  return {{"clusters", clusters},
          {"sliced_w1", q.sliced_w1},
          {"max_weight_error", q.max_weight_error},
          {"max_mean_error", std::isfinite(q.max_mean_error) ? json(q.max_mean_error) : json(nullptr)}};
}

json to_json(const SpectrumReport& r) {
  json coeffs = json::array();
  for (std::size_t k = 0; k < r.indices.size(); ++k) {
    const auto row = r.coefficients.row(static_cast<Eigen::Index>(k));
    coeffs.push_back({{"index", r.indices[k].entries}, {"value", std::vector<double>(row.begin(), row.end())}});
  }
  return {{"n", r.n},
          {"sigma_sq", r.sigma_sq},
          {"center", std::vector<double>(r.center.begin(), r.center.end())},
          {"d_max", r.d_max},
          {"nodes", r.nodes.size()},
          {"coefficients", coeffs},
          {"tails", r.tails}};
}

void write_csv(const fs::path& path, const PointSet& points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (Eigen::Index c = 0; c < points.cols(); ++c) out << (c ? "," : "") << 'x' << c;
  out << '\n';
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      out << (c ? "," : "") << format_double(points(i, c));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

PointSet read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header");
  int n = 0;
  {
    std::stringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (!name.empty() && name.back() == '\r') name.pop_back();
      if (name != "x" + std::to_string(n)) {
        throw FormatError(path.string() + ": header column " + std::to_string(n) + " is '" + name + "'");
      }
      ++n;
    }
  }
  if (n == 0) throw FormatError(path.string() + ": empty header");
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    for (int c = 0; c < n; ++c) {
      double v = 0.0;
      const auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) {
        throw FormatError(path.string() + ": row " + std::to_string(rows + 1) + " column " + std::to_string(c) +
                          " is not a number");
      }
      values.push_back(v);
      p = next;
      if (c + 1 < n) {
        if (p == end || *p != ',') throw FormatError(path.string() + ": row " + std::to_string(rows + 1) + " is short");
        ++p;
      }
    }
    if (p != end) throw FormatError(path.string() + ": row " + std::to_string(rows + 1) + " has extra columns");
    ++rows;
  }
  PointSet pts(static_cast<Eigen::Index>(rows), n);
  std::copy(values.begin(), values.end(), pts.data());
  return pts;
}

void write_spectrum_csv(const fs::path& path, const SpectrumReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "degree,tail\n";
  for (std::size_t d = 0; d < report.tails.size(); ++d) out << d << ',' << format_double(report.tails[d]) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void save_stack(const fs::path& dir, const TrainedStack& stack) {
  fs::create_directories(dir / "models");
  write_json(dir / "schedule.json", to_json(stack.schedule));
  write_json(dir / "stack.json", {{"degree_formula", stack.degree_formula},
                                  {"degree", stack.degree},
                                  {"norm_bound", stack.norm_bound},
                                  {"sigma0_sq", stack.sigma0_sq},
                                  {"m2_sample_count", stack.m2_sample_count},
                                  {"levels", stack.models.size()}});
  for (const auto& [level, model] : stack.models) {
    json j = to_json(*model);
    j["level"] = level;
    j["t"] = stack.schedule.time(level);
    write_json(dir / "models" / ("level_" + std::to_string(level) + ".json"), j);
  }
  json history = json::array();
  for (auto it = stack.warm_start_history.rbegin(); it != stack.warm_start_history.rend(); ++it) {
    json j = to_json(it->second);
    j["level"] = it->first;
    history.push_back(std::move(j));
  }
  write_json(dir / "warmstarts.json", {{"history", history}});
  std::ofstream audit(dir / "audit.jsonl");
  for (const auto& a : stack.audit) audit << to_json(a).dump() << '\n';
}

TrainedStack load_stack(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("model directory not found: " + dir.string());
  TrainedStack stack;
  stack.schedule = schedule_from_json(read_json(dir / "schedule.json"));
  const json meta = read_json(dir / "stack.json");
  stack.degree_formula = get<int>(meta, "degree_formula", "stack");
  stack.degree = get<int>(meta, "degree", "stack");
  stack.norm_bound = get<double>(meta, "norm_bound", "stack");
  stack.sigma0_sq = get<double>(meta, "sigma0_sq", "stack");
  stack.m2_sample_count = get<std::size_t>(meta, "m2_sample_count", "stack");
  for (std::size_t l = 2; l <= stack.schedule.size(); ++l) {
    const fs::path file = dir / "models" / ("level_" + std::to_string(l) + ".json");
    if (!fs::exists(file)) throw std::runtime_error("missing model file " + file.string());
    stack.models.emplace(l, std::make_shared<const PiecewiseScoreModel>(score_model_from_json(read_json(file))));
  }
  const json ws = read_json(dir / "warmstarts.json");
  for (const auto& j : member(ws, "history", "warmstarts")) {
    stack.warm_start_history.emplace(get<std::size_t>(j, "level", "warmstarts.history"), warm_starts_from_json(j));
  }
  std::ifstream audit(dir / "audit.jsonl");
  std::string line;
  while (std::getline(audit, line)) {
    if (!line.empty()) stack.audit.push_back(audit_from_json(json::parse(line)));
  }
  return stack;
}

}  // namespace gmdiffuse::io
