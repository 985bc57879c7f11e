#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "gmdiffuse/kernels.hpp"
#include "gmdiffuse/noise_schedule.hpp"
#include "gmdiffuse/score_model.hpp"
#include "gmdiffuse/types.hpp"

namespace gmdiffuse {

/// Score estimates keyed by the exact schedule time they were fit at.
using ScoreStack = std::map<double, std::shared_ptr<const ScoreModel>>;

/// Oracle scores of `spec` at every schedule time.
ScoreStack oracle_stack(const MixtureSpec& spec, const NoiseSchedule& schedule);

struct ReverseTrajectory {
  std::vector<double> times;  // decreasing, T first
  std::vector<Vector> states;
  std::uint64_t seed = 0;
  std::size_t index = 0;
};

/// Score coefficient c(t_prev, t_next) of a reverse step.
using StepCoefficient = double (*)(double t_prev, double t_next);

struct SamplerOptions {
  StepCoefficient coefficient = &reverse_step_coefficient;
  Exec exec = Exec::parallel;
};

/// y_T ~ N(0, (T+1) I_n).
Vector init_sample(double T, int n, std::uint64_t seed);

/// y + c(t_prev, t_next) score + sqrt(t_next - t_prev) noise.
Vector reverse_step(PointRef y, PointRef score_value, double t_prev, double t_next, PointRef noise,
                    StepCoefficient coefficient = &reverse_step_coefficient);

/// Throws std::invalid_argument if a score is missing for any time t_2..t_N.
void check_stack(const ScoreStack& models, const NoiseSchedule& schedule);

/// Runs `count` independent reverse trajectories from T down to t_1. The
/// trajectory with index i draws all its randomness from
/// make_stream(seed, i), so results do not depend on count or threads.
/// Exec::parallel advances all trajectories one time step at a time;
/// Exec::serial runs each trajectory to completion before the next.
PointSet generate(const ScoreStack& models, const NoiseSchedule& schedule, std::size_t count,
                  std::uint64_t seed, const SamplerOptions& options = {});

/// Full state history of trajectory `index` (same randomness as generate).
ReverseTrajectory trace_trajectory(const ScoreStack& models, const NoiseSchedule& schedule,
                                   std::uint64_t seed, std::size_t index,
                                   const SamplerOptions& options = {});

}  // namespace gmdiffuse
