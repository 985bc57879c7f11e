#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numeric>

#include "gmdiffuse/diagnostics.hpp"
#include "gmdiffuse/pipeline.hpp"
#include "support.hpp"

using namespace gmdiffuse;
using namespace gmdiffuse::test;

TEST_CASE("halving refresh points") {
  // t + 1 halves at every step.
  std::vector<double> times;
  for (int k = 1; k <= 8; ++k) times.push_back(std::pow(2.0, k) - 1.0);
  const auto geo = schedule_from_times(times);
  const auto every = halving_refresh_points(geo);
  CHECK(every == std::vector<std::size_t>{7, 6, 5, 4, 3, 2, 1});

  const auto two = schedule_from_times({0.9, 2.0});
  CHECK(halving_refresh_points(two).empty());

  const auto s = build_schedule(0.3, 1.0, 2, 4.0);
  const auto r = halving_refresh_points(s);
  CHECK(r == halving_refresh_points(s));
  double last = s.T;
  std::size_t at = 0;
  for (std::size_t l = s.size(); l >= 1; --l) {
    const bool fires = s.time(l) + 1.0 <= 0.5 * (last + 1.0) * (1 + 1e-12);
    const bool listed = at < r.size() && r[at] == l;
    CHECK(fires == listed);
    if (fires) {
      last = s.time(l);
      ++at;
    }
  }
  CHECK(at == r.size());
}

TEST_CASE("degree formula") {
  const double le = std::log(1.0 / 0.3);
  CHECK(theoretical_degree(0.3, 1.0, 1.0) == static_cast<int>(std::ceil((le * le * le + 1.0) * std::pow(le, 4))));
}

TEST_CASE("training on a point mass") {
  const auto spec = origin_mass(1);
  MixtureSampleSource source(spec, 3);
  TrainConfig cfg;
  cfg.seed = 5;
  cfg.locality = spec.locality;
  const auto stack = train(source, cfg);

  const auto& s = stack.schedule;
  REQUIRE(s.size() >= 2);
  CHECK(stack.degree == std::min(stack.degree_formula, cfg.degree));

  // Models keyed by exactly the times t_2..t_N.
  CHECK(stack.models.size() == s.size() - 1);
  const auto scores = stack.score_stack();
  for (std::size_t l = 2; l <= s.size(); ++l) CHECK(scores.count(s.time(l)) == 1);
  CHECK(scores.count(s.time(1)) == 0);

  // Warm-start history starts at {0} and never widens.
  const auto& first = stack.warm_start_history.at(s.size());
  CHECK(first.size() == 1);
  CHECK(first.centers.norm() == 0.0);
  double prev = std::numeric_limits<double>::infinity();
  for (auto it = stack.warm_start_history.rbegin(); it != stack.warm_start_history.rend(); ++it) {
    CHECK(it->second.radius <= prev);
    prev = it->second.radius;
  }

  // Audit: one record per level in decreasing order, fresh refresh batches
  // drawn after the regression batch.
  REQUIRE(stack.audit.size() == s.size() - 1);
  std::size_t expected_offset = stack.m2_sample_count;
  for (std::size_t i = 0; i < stack.audit.size(); ++i) {
    const auto& a = stack.audit[i];
    CHECK(a.level == s.size() - i);
    CHECK(a.t == s.time(a.level));
    CHECK(std::abs(a.sigma_sq - (a.t + 1.0)) <= 1e-12);
    CHECK(a.cell_counts.size() == a.cells);
    CHECK(std::accumulate(a.cell_counts.begin(), a.cell_counts.end(), std::size_t{0}) == cfg.samples_per_level);
    CHECK(a.regression_offset == expected_offset);
    expected_offset += a.regression_count;
    if (a.refreshed) {
      CHECK(a.refresh_offset == a.regression_offset + a.regression_count);
      expected_offset += a.refresh_count;
    }
  }
  CHECK(source.consumed() == expected_offset);

  // Relative score error averaged over levels.
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t l = 2; l <= s.size(); l += 10) {
    total += score_l2_error(*stack.models.at(l), spec, s.time(l), 2000, 100 + l).relative();
    ++count;
  }
  CHECK(total / count <= 0.15);
}

TEST_CASE("training reports the level that ran out of samples") {
  const auto spec = origin_mass(1);
  TableSampleSource source(sample_mixture(spec, 2500, 1));
  TrainConfig cfg;
  cfg.samples_per_level = 1000;
  cfg.M2 = 0.5;
  try {
    (void)train(source, cfg);
    FAIL("expected InsufficientSamples");
  } catch (const InsufficientSamples& e) {
    const std::string what = e.what();
    const auto s = build_schedule(cfg.eps, 1.0, 1, 0.5);
    CHECK(what.find("level " + std::to_string(s.size() - 2)) != std::string::npos);
  }
}

TEST_CASE("training config validation") {
  TrainConfig cfg;
  cfg.eps = 0.7;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.degree = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.samples_per_level = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
