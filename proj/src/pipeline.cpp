#include "gmdiffuse/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "gmdiffuse/logging.hpp"
#include "gmdiffuse/rng.hpp"

namespace gmdiffuse {
namespace {

// Relative slack for the halving test so exact geometric halving is not
// lost to rounding in t + 1.
constexpr double kHalvingSlack = 1e-12;

std::uint64_t regression_seed(std::uint64_t seed, std::size_t level) { return derive_seed(seed, 2 * level); }
std::uint64_t refresh_seed(std::uint64_t seed, std::size_t level) { return derive_seed(seed, 2 * level + 1); }

}  // namespace

void TrainConfig::validate() const {
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("train: eps must lie in (0, 1/2]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("train: delta must lie in (0, 1)");
  if (degree < 0) throw std::invalid_argument("train: degree must be >= 0");
  if (samples_per_level < 1) throw std::invalid_argument("train: samples_per_level must be >= 1");
  if (!(sigma0_sq > 0.0)) throw std::invalid_argument("train: sigma0_sq must be positive");
  if (!(effective_norm_bound() > 0.0)) throw std::invalid_argument("train: norm bound must be positive");
  if (locality.k < 1 || !(locality.alpha_min > 0.0 && locality.alpha_min <= 1.0) || !(locality.R0 > 0.0)) {
    throw std::invalid_argument("train: locality parameters out of range");
  }
}

ScoreStack TrainedStack::score_stack() const {
  ScoreStack stack;
  for (const auto& [level, model] : models) stack.emplace(schedule.time(level), model);
  return stack;
}

std::vector<std::size_t> halving_refresh_points(const NoiseSchedule& schedule) {
  check_times(schedule.times);
  std::vector<std::size_t> levels;
  double reference = schedule.times.back();
  for (std::size_t l = schedule.size(); l >= 1; --l) {
    const double t = schedule.time(l);
    if (t + 1.0 <= 0.5 * (reference + 1.0) * (1.0 + kHalvingSlack)) {
      levels.push_back(l);
      reference = t;
    }
  }
  return levels;
}

int theoretical_degree(double eps, double R0, double sigma0_sq) {
  const double le = std::log(1.0 / eps);
  const double ratio = R0 / std::sqrt(sigma0_sq);
  return static_cast<int>(std::ceil((std::pow(le, 3) + std::pow(ratio, 6)) * std::pow(le, 4)));
}

TrainedStack train(SampleSource& source, const TrainConfig& cfg) {
  cfg.validate();
  const int n = source.dimension();

  TrainedStack out;
  out.sigma0_sq = cfg.sigma0_sq;
  out.norm_bound = cfg.effective_norm_bound();
  double M2 = 0.0;
  if (cfg.M2) {
    M2 = *cfg.M2;
  } else {
    const PointSet batch = source.draw(cfg.m2_samples);
    M2 = batch.rowwise().squaredNorm().mean();
    out.m2_sample_count = cfg.m2_samples;
    log::info("train: estimated M2={} from {} samples", M2, cfg.m2_samples);
  }
  out.schedule = build_schedule(cfg.eps, cfg.sigma0_sq, n, M2);
  const NoiseSchedule& schedule = out.schedule;
  const std::size_t N = schedule.size();
  if (N < 2) throw std::invalid_argument("train: schedule has fewer than two levels");

  out.degree_formula = theoretical_degree(cfg.eps, cfg.locality.R0, cfg.sigma0_sq);
  out.degree = std::min(out.degree_formula, cfg.degree);
  log::info("train: N={} levels, degree formula {} -> using {}", N, out.degree_formula, out.degree);

  const auto refresh_levels = halving_refresh_points(schedule);
  const std::set<std::size_t> refresh(refresh_levels.begin(), refresh_levels.end());
  const double refresh_delta = cfg.delta / (2.0 * static_cast<double>(N));
  const std::size_t refresh_count =
      std::max(cfg.warm_start_samples, required_refresh_samples(cfg.locality, refresh_delta, cfg.warm_start));

  WarmStartSet current;
  current.centers = PointSet::Zero(1, n);
  current.noise_level = schedule.times.back() + cfg.sigma0_sq;
  current.radius = warm_start_radius(cfg.locality, current.noise_level, cfg.warm_start);
  out.warm_start_history.emplace(N, current);

  for (std::size_t l = N; l >= 2; --l) {
    const double t = schedule.time(l);
    LevelAudit audit;
    audit.level = l;
    audit.t = t;
    audit.sigma_sq = t + cfg.sigma0_sq;
    audit.cells = current.size();

    audit.regression_offset = source.consumed();
    PointSet xs;
    try {
      xs = source.draw(cfg.samples_per_level);
    } catch (const InsufficientSamples& e) {
      throw InsufficientSamples("level " + std::to_string(l) + " regression batch: " + e.what());
    }
    audit.regression_count = cfg.samples_per_level;

    const auto ds = build_denoising_dataset(xs, t, cfg.sigma0_sq, current, regression_seed(cfg.seed, l));
    const FeatureBasis basis(n, out.degree, ds.sigma_sq, true, cfg.basis_cap);
    std::vector<CellReport> cells;
    auto model = std::make_shared<const PiecewiseScoreModel>(
        fit_piecewise(ds, current, basis, out.norm_bound, &cells));
    double total = 0.0;
    for (const auto& c : cells) {
      audit.cell_counts.push_back(c.samples);
      audit.cell_losses.push_back(c.loss);
      audit.constrained_cells += c.constrained ? 1 : 0;
      total += c.loss * static_cast<double>(c.samples);
    }
    audit.loss = total / static_cast<double>(cfg.samples_per_level);
    out.models.emplace(l, model);

    if (refresh.contains(l)) {
      audit.refreshed = true;
      audit.refresh_offset = source.consumed();
      PointSet fresh;
      try {
        fresh = source.draw(refresh_count);
      } catch (const InsufficientSamples& e) {
        throw InsufficientSamples("level " + std::to_string(l) + " warm-start batch: " + e.what());
      }
      audit.refresh_count = refresh_count;
      const PointSet ys = add_gaussian_noise(fresh, t, refresh_seed(cfg.seed, l));
      auto result = refresh_warm_starts(*model, ys, cfg.locality, ds.sigma_sq, refresh_delta, cfg.warm_start);
      audit.refresh_residual = result.residual;
      audit.refreshed_centers = result.set.size();
      current = std::move(result.set);
      out.warm_start_history.emplace(l - 1, current);
      log::debug("train: level {} t={} refreshed -> {} centers (radius {})", l, t, current.size(),
                 current.radius);
    }
    out.audit.push_back(std::move(audit));
  }
  return out;
}

}  // namespace gmdiffuse
