#include "gmdiffuse/reverse_sampler.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "gmdiffuse/rng.hpp"

namespace gmdiffuse {
namespace {

Vector draw_normal(std::mt19937_64& gen, int n, double scale) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * normal(gen);
  return v;
}

std::vector<const ScoreModel*> models_by_level(const ScoreStack& models,
                                               const NoiseSchedule& schedule) {
  check_stack(models, schedule);
  std::vector<const ScoreModel*> out(schedule.size(), nullptr);
  for (std::size_t l = 1; l < schedule.size(); ++l) out[l] = models.at(schedule.times[l]).get();
  return out;
}

int stack_dimension(const std::vector<const ScoreModel*>& by_level) {
  for (const auto* m : by_level) {
    if (m) return m->dimension();
  }
  throw std::invalid_argument("generate: no score models");
}

}  // namespace

ScoreStack oracle_stack(const MixtureSpec& spec, const NoiseSchedule& schedule) {
  ScoreStack stack;
  const MixtureOracle oracle(spec);
  for (double t : schedule.times) stack.emplace(t, std::make_shared<OracleScore>(oracle, t));
  return stack;
}

Vector init_sample(double T, int n, std::uint64_t seed) {
  if (!(T > 0.0)) throw std::invalid_argument("init_sample: T must be positive");
  auto gen = make_stream(seed, 0);
  return draw_normal(gen, n, std::sqrt(T + 1.0));
}

Vector reverse_step(PointRef y, PointRef score_value, double t_prev, double t_next, PointRef noise,
                    StepCoefficient coefficient) {
  if (!(t_prev < t_next)) throw std::invalid_argument("reverse_step: requires t_prev < t_next");
  return y + coefficient(t_prev, t_next) * score_value + std::sqrt(t_next - t_prev) * noise;
}

void check_stack(const ScoreStack& models, const NoiseSchedule& schedule) {
  check_times(schedule.times);
  for (std::size_t l = 1; l < schedule.size(); ++l) {
    const auto it = models.find(schedule.times[l]);
    if (it == models.end() || !it->second) {
      throw std::invalid_argument("missing score model for level " + std::to_string(l + 1) +
                                  " (t=" + std::to_string(schedule.times[l]) + ")");
    }
  }
}

PointSet generate(const ScoreStack& models, const NoiseSchedule& schedule, std::size_t count,
                  std::uint64_t seed, const SamplerOptions& options) {
  const auto by_level = models_by_level(models, schedule);
  const int n = stack_dimension(by_level);
  PointSet out(static_cast<Eigen::Index>(count), n);
  if (count == 0) return out;
  const double T = schedule.times.back();
  const std::size_t N = schedule.size();

  if (options.exec == Exec::serial) {
    for (std::size_t i = 0; i < count; ++i) {
      auto gen = make_stream(seed, i);
      Vector y = draw_normal(gen, n, std::sqrt(T + 1.0));
      for (std::size_t l = N - 1; l >= 1; --l) {
        const double t_next = schedule.times[l];
        const double t_prev = schedule.times[l - 1];
        const Vector s = by_level[l]->score(y);
        const Vector xi = draw_normal(gen, n, 1.0);
        y = reverse_step(y, s, t_prev, t_next, xi, options.coefficient);
      }
      out.row(static_cast<Eigen::Index>(i)) = y.transpose();
    }
    return out;
  }

  std::vector<std::mt19937_64> gens(count);
  for_each_index(count, Exec::parallel, [&](std::size_t i) {
    gens[i] = make_stream(seed, i);
    out.row(static_cast<Eigen::Index>(i)) = draw_normal(gens[i], n, std::sqrt(T + 1.0)).transpose();
  });
  for (std::size_t l = N - 1; l >= 1; --l) {
    const double t_next = schedule.times[l];
    const double t_prev = schedule.times[l - 1];
    const ScoreModel& model = *by_level[l];
    for_each_index(count, Exec::parallel, [&](std::size_t i) {
      auto row = out.row(static_cast<Eigen::Index>(i));
      const Vector y = row.transpose();
      const Vector s = model.score(y);
      const Vector xi = draw_normal(gens[i], n, 1.0);
      row = reverse_step(y, s, t_prev, t_next, xi, options.coefficient).transpose();
    });
  }
  return out;
}

ReverseTrajectory trace_trajectory(const ScoreStack& models, const NoiseSchedule& schedule,
                                   std::uint64_t seed, std::size_t index,
                                   const SamplerOptions& options) {
  const auto by_level = models_by_level(models, schedule);
  const int n = stack_dimension(by_level);
  ReverseTrajectory traj;
  traj.seed = seed;
  traj.index = index;
  auto gen = make_stream(seed, index);
  Vector y = draw_normal(gen, n, std::sqrt(schedule.times.back() + 1.0));
  traj.times.push_back(schedule.times.back());
  traj.states.push_back(y);
  for (std::size_t l = schedule.size() - 1; l >= 1; --l) {
    const Vector s = by_level[l]->score(y);
    const Vector xi = draw_normal(gen, n, 1.0);
    y = reverse_step(y, s, schedule.times[l - 1], schedule.times[l], xi, options.coefficient);
    traj.times.push_back(schedule.times[l - 1]);
    traj.states.push_back(y);
  }
  return traj;
}

}  // namespace gmdiffuse
