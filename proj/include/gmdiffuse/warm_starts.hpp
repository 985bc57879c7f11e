#pragma once

#include <cstddef>

#include "gmdiffuse/kernels.hpp"
#include "gmdiffuse/mixture_model.hpp"
#include "gmdiffuse/score_model.hpp"
#include "gmdiffuse/set_cover.hpp"
#include "gmdiffuse/types.hpp"

namespace gmdiffuse {

/// Current cluster-center estimates. Their Voronoi cells are the pieces of
/// the piecewise score model.
struct WarmStartSet {
  PointSet centers;
  double radius = 1.0;
  double noise_level = 1.0;  // sigma^2 the set was produced at

  std::size_t size() const { return static_cast<std::size_t>(centers.rows()); }
  /// Throws std::invalid_argument if empty, radius <= 0, or two centers
  /// lie within kCenterDedup of each other.
  void validate() const;
};

inline constexpr double kCenterDedup = 1e-9;

/// Constants of the refresh step; none are fixed by theory.
struct WarmStartConfig {
  double radius_const = 4.0;  // R~ = C (R0 + sigma sqrt(ln(1/alpha_min)))
  double rounds_const = 4.0;  // ceil(C' k ln(1/alpha_min)) greedy rounds
  double sample_const = 1.0;  // |samples| >= c ln(1/delta) k / alpha_min
};

/// Index of the nearest center (lowest index on ties).
std::size_t assign_voronoi(const PointSet& centers, PointRef y);

/// mu_i = y_i + sigma^2 s(y_i), one per row, order preserved.
PointSet denoise_points(const ScoreModel& score, const PointSet& ys, double sigma_sq,
                        Exec exec = Exec::parallel);

double warm_start_radius(const KLocalityParams& params, double sigma_sq, const WarmStartConfig& cfg);
std::size_t round_budget(const KLocalityParams& params, const WarmStartConfig& cfg);
std::size_t required_refresh_samples(const KLocalityParams& params, double delta,
                                     const WarmStartConfig& cfg);

struct RefreshResult {
  WarmStartSet set;
  std::size_t residual = 0;  // candidates left uncovered when rounds ran out
};

/// Denoise the samples with `score` and greedily cover the candidates.
/// Throws std::invalid_argument when fewer samples than
/// required_refresh_samples are supplied.
RefreshResult refresh_warm_starts(const ScoreModel& score, const PointSet& samples,
                                  const KLocalityParams& params, double sigma_sq, double delta,
                                  const WarmStartConfig& cfg = {});

}  // namespace gmdiffuse
