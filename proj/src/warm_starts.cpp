#include "gmdiffuse/warm_starts.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gmdiffuse/logging.hpp"

namespace gmdiffuse {

void WarmStartSet::validate() const {
  if (centers.rows() == 0) throw std::invalid_argument("warm starts: no centers");
  if (!(radius > 0.0)) throw std::invalid_argument("warm starts: radius must be positive");
  for (Eigen::Index i = 0; i < centers.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < centers.rows(); ++j) {
      if ((centers.row(i) - centers.row(j)).norm() <= kCenterDedup) {
        throw std::invalid_argument("warm starts: centers " + std::to_string(i) + " and " +
                                    std::to_string(j) + " coincide");
      }
    }
  }
}

std::size_t assign_voronoi(const PointSet& centers, PointRef y) {
  if (centers.rows() == 0) throw std::invalid_argument("assign_voronoi: no centers");
  return nearest_center(centers, y);
}

PointSet denoise_points(const ScoreModel& score, const PointSet& ys, double sigma_sq, Exec exec) {
  PointSet out = score_batch(score, ys, exec);
  out = ys + sigma_sq * out;
  return out;
}

double warm_start_radius(const KLocalityParams& params, double sigma_sq, const WarmStartConfig& cfg) {
  return cfg.radius_const *
         (params.R0 + std::sqrt(sigma_sq) * std::sqrt(std::log(1.0 / params.alpha_min)));
}

std::size_t round_budget(const KLocalityParams& params, const WarmStartConfig& cfg) {
  const double r = std::ceil(cfg.rounds_const * params.k * std::log(1.0 / params.alpha_min));
  return std::max<std::size_t>(1, static_cast<std::size_t>(r));
}

std::size_t required_refresh_samples(const KLocalityParams& params, double delta,
                                     const WarmStartConfig& cfg) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("warm starts: delta must lie in (0, 1)");
  const double r = std::ceil(cfg.sample_const * std::log(1.0 / delta) * params.k / params.alpha_min);
  return std::max<std::size_t>(1, static_cast<std::size_t>(r));
}

RefreshResult refresh_warm_starts(const ScoreModel& score, const PointSet& samples,
                                  const KLocalityParams& params, double sigma_sq, double delta,
                                  const WarmStartConfig& cfg) {
  const std::size_t need = required_refresh_samples(params, delta, cfg);
  if (static_cast<std::size_t>(samples.rows()) < need) {
    throw std::invalid_argument("refresh_warm_starts: " + std::to_string(samples.rows()) +
                                " samples supplied, " + std::to_string(need) + " required");
  }
  const PointSet candidates = denoise_points(score, samples, sigma_sq);
  const double radius = warm_start_radius(params, sigma_sq, cfg);
  const auto cover = greedy_cover(candidates, radius, round_budget(params, cfg));
  if (cover.uncovered > 0) {
    log::info("warm starts: {} of {} candidates left uncovered at sigma^2={}", cover.uncovered,
              candidates.rows(), sigma_sq);
  }
  RefreshResult out;
  out.residual = cover.uncovered;
  out.set.radius = radius;
  out.set.noise_level = sigma_sq;
  out.set.centers.resize(static_cast<Eigen::Index>(cover.selected.size()), samples.cols());
  for (std::size_t i = 0; i < cover.selected.size(); ++i) {
    out.set.centers.row(static_cast<Eigen::Index>(i)) =
        candidates.row(static_cast<Eigen::Index>(cover.selected[i]));
  }
  return out;
}

}  // namespace gmdiffuse
