#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "gmdiffuse/noise_schedule.hpp"
#include "gmdiffuse/reverse_sampler.hpp"
#include "gmdiffuse/sample_source.hpp"
#include "gmdiffuse/score_regression.hpp"
#include "gmdiffuse/warm_starts.hpp"

namespace gmdiffuse {

struct TrainConfig {
  double eps = 0.3;
  double delta = 0.1;
  int degree = 4;  // cap on the polynomial degree
  std::size_t samples_per_level = 20000;
  /// Refresh batch size; the larger of this and the count the refresh
  /// step requires is drawn.
  std::size_t warm_start_samples = 2000;
  WarmStartConfig warm_start;
  std::uint64_t seed = 0;
  double sigma0_sq = 1.0;
  KLocalityParams locality;
  std::optional<double> norm_bound;  // defaults to locality.D
  std::optional<double> M2;          // estimated from a sample batch if absent
  std::size_t m2_samples = 10000;
  std::size_t basis_cap = kDefaultBasisCap;

  void validate() const;
  double effective_norm_bound() const { return norm_bound.value_or(locality.D); }
};

/// Per-level record of the learning phase.
struct LevelAudit {
  std::size_t level = 0;
  double t = 0.0;
  double sigma_sq = 0.0;
  std::size_t cells = 0;
  std::vector<std::size_t> cell_counts;
  std::vector<double> cell_losses;
  std::size_t constrained_cells = 0;
  double loss = 0.0;  // mean squared residual over the level batch
  std::size_t regression_offset = 0;  // stream position of the regression batch
  std::size_t regression_count = 0;
  bool refreshed = false;
  std::size_t refresh_offset = 0;
  std::size_t refresh_count = 0;
  std::size_t refresh_residual = 0;
  std::size_t refreshed_centers = 0;
};

struct TrainedStack {
  NoiseSchedule schedule;
  int degree_formula = 0;
  int degree = 0;
  double norm_bound = 0.0;
  double sigma0_sq = 1.0;
  std::size_t m2_sample_count = 0;  // 0 when M2 was supplied
  /// Score models keyed by level l (t_l = schedule.time(l)), l = N..2.
  std::map<std::size_t, std::shared_ptr<const PiecewiseScoreModel>> models;
  /// C_l keyed by l: C_N = {0} and every refreshed C_{l-1}.
  std::map<std::size_t, WarmStartSet> warm_start_history;
  std::vector<LevelAudit> audit;

  ScoreStack score_stack() const;
  /// The warm starts in force at the smallest level.
  const WarmStartSet& final_warm_starts() const { return warm_start_history.begin()->second; }
};

/// Levels l (1-based) at which t_l + 1 has halved since the last refresh,
/// scanning down from l = N with the reference initialised to T.
std::vector<std::size_t> halving_refresh_points(const NoiseSchedule& schedule);

/// ceil((ln(1/eps)^3 + (R0/sigma0)^6) ln(1/eps)^4), constant taken as 1.
int theoretical_degree(double eps, double R0, double sigma0_sq);

/// Learning phase: fits a piecewise score model at every level from N down
/// to 2 with a fresh regression batch, refreshing warm starts from a further
/// fresh batch whenever t + 1 has halved.
TrainedStack train(SampleSource& source, const TrainConfig& cfg);

}  // namespace gmdiffuse
