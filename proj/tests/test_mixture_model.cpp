#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "gmdiffuse/mixture_model.hpp"
#include "support.hpp"

using namespace gmdiffuse;
using namespace gmdiffuse::test;

TEST_CASE("mixture spec validation rejects malformed specs") {
  MixtureSpec s = symmetric_pair(1.0);
  CHECK_NOTHROW(s.validate());

  auto bad = s;
  bad.components[0].weight = 0.4;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.components[1].mean = vec({1.0, 2.0});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.components[0].mean[0] = std::nan("");
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.sigma0_sq = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("k-locality report") {
  MixtureSpec s = from_means({{0.0}, {10.0}});
  s.locality = {1.0, 0.5, 10.0, 2};
  CHECK(validate_k_locality(s).empty());

  SUBCASE("insufficient local mass") {
    s.locality.alpha_min = 0.6;
    const auto r = validate_k_locality(s);
    CHECK(has_violation(r, LocalityClause::min_mass));
    CHECK_FALSE(has_violation(r, LocalityClause::support_radius));
  }
  SUBCASE("mean outside the support radius") {
    s.components[1].mean = vec({11.0});
    const auto r = validate_k_locality(s);
    CHECK(has_violation(r, LocalityClause::support_radius));
  }
  SUBCASE("too few balls") {
    s.locality.k = 1;
    CHECK(has_violation(validate_k_locality(s), LocalityClause::ball_cover));
  }
}

TEST_CASE("sampling") {
  CHECK(sample_mixture(origin_mass(2), 0, 1).rows() == 0);

  SUBCASE("standard Gaussian moments") {
    const PointSet p = sample_mixture(origin_mass(1), 100000, 7);
    CHECK(std::abs(p.col(0).mean()) < 0.02);
    CHECK(std::abs(sample_variance(p, 0) - 1.0) < 0.03);
  }
  SUBCASE("component frequencies") {
    const PointSet p = sample_mixture(symmetric_pair(5.0), 10000, 11);
    const double frac = (p.col(0).array() > 0.0).cast<double>().mean();
    CHECK(std::abs(frac - 0.5) < 0.02);
  }
  SUBCASE("deterministic and prefix-stable") {
    const auto spec = symmetric_pair(2.0);
    const PointSet a = sample_mixture(spec, 3000, 5);
    const PointSet b = sample_mixture(spec, 3000, 5);
    const PointSet c = sample_mixture(spec, 5000, 5);
    CHECK(a == b);
    CHECK(a == c.topRows(3000));
    CHECK(a != sample_mixture(spec, 3000, 6));
  }
}

TEST_CASE("posterior mean examples") {
  const Vector mu = vec({1.5, -2.0});
  const auto point_spec = point_mass(mu);
  for (double y0 : {-50.0, 0.0, 3.0}) {
    CHECK((posterior_mean(point_spec, vec({y0, 1.0}), 0.7) - mu).norm() == doctest::Approx(0.0));
  }

  const auto pair = symmetric_pair(1.0);
  CHECK(posterior_mean(pair, vec({0.0}), 1.0)[0] == doctest::Approx(0.0));
  CHECK(posterior_mean(pair, vec({1.0}), 1.0)[0] == doctest::Approx(0.7615941559557649).epsilon(1e-14));
  for (double y : {-2.0, -0.3, 0.4, 3.0}) {
    CHECK(posterior_mean(pair, vec({y}), 1.0)[0] == doctest::Approx(std::tanh(y)).epsilon(1e-13));
  }
}

TEST_CASE("posterior weights stay finite at tiny noise") {
  const auto spec = from_means({{0.0, 0.0}, {400.0, 0.0}, {0.0, -300.0}});
  const Vector w = posterior_weights(spec, vec({390.0, 0.0}), 1e-4);
  CHECK(w.allFinite());
  CHECK(w[1] == doctest::Approx(1.0));
  const Vector f = posterior_mean(spec, vec({1e6, -1e6}), 1e-6);
  CHECK(f.allFinite());
}

TEST_CASE("convex hull property on random mixtures") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 3;
    const auto spec = random_mixture(gen, 1 + trial % 5, n);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = 4.0 * normal(gen);
    const double s2 = 0.05 + 0.1 * trial;
    const Vector w = posterior_weights(spec, y, s2);
    CHECK((w.array() >= 0.0).all());
    CHECK(std::abs(w.sum() - 1.0) <= 1e-12);
    const Vector f = posterior_mean(spec, y, s2);
    CHECK((f - spec.means().transpose() * w).norm() <= 1e-12 * (1.0 + f.norm()));
  }
}

TEST_CASE("exact score examples") {
  CHECK(exact_score(origin_mass(1), vec({2.0}), 1.0)[0] == doctest::Approx(-1.0));
  CHECK(exact_score(symmetric_pair(3.0), vec({0.0}), 0.5)[0] == doctest::Approx(0.0));

  // Single Gaussian score is linear, exactly.
  const Vector mu = vec({0.5, -1.0, 2.0});
  const auto spec = point_mass(mu, 0.8);
  const Vector y = vec({1.0, 2.0, -3.0});
  const double t = 1.7;
  const Vector expected = (mu - y) / (t + 0.8);
  CHECK((exact_score(spec, y, t) - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("score equals finite difference of the log density") {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3;
    const auto spec = random_mixture(gen, 1 + trial % 4, n);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = 2.0 * normal(gen);
    const double t = 0.1 * trial;
    const Vector s = exact_score(spec, y, t);
    const double h = 1e-5;
    for (int i = 0; i < n; ++i) {
      Vector up = y, dn = y;
      up[i] += h;
      dn[i] -= h;
      const double fd = (log_density(spec, up, t) - log_density(spec, dn, t)) / (2 * h);
      CHECK(std::abs(fd - s[i]) <= 1e-5);
    }
  }
}

TEST_CASE("Tweedie identity between posterior mean and score") {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 3;
    const auto spec = random_mixture(gen, 1 + trial % 5, n);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = 3.0 * normal(gen);
    const double t = 0.25 * trial;
    const double s2 = t + spec.sigma0_sq;
    const Vector f = posterior_mean(spec, y, s2);
    const Vector g = y + s2 * exact_score(spec, y, t);
    CHECK((f - g).norm() <= 1e-10 * (1.0 + f.norm()));
  }
}

TEST_CASE("log density") {
  CHECK(log_density(origin_mass(1), vec({0.0}), 0.0) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-15));

  std::mt19937_64 gen(5);
  const auto spec = random_mixture(gen, 3, 2);
  auto shifted = spec;
  const Vector v = vec({3.0, -7.5});
  for (auto& c : shifted.components) c.mean += v;
  const Vector y = vec({0.3, 1.1});
  CHECK(log_density(shifted, y + v, 0.4) == doctest::Approx(log_density(spec, y, 0.4)).epsilon(1e-12));

  // Composite Simpson on a wide interval: p_t integrates to one.
  const auto pair = symmetric_pair(2.0, 0.5);
  const int m = 200000;
  const double lo = -40.0, hi = 40.0, h = (hi - lo) / m;
  double acc = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::exp(log_density(pair, vec({lo + i * h}), 0.3));
  }
  CHECK(std::abs(acc * h / 3.0 - 1.0) <= 1e-8);
}

TEST_CASE("sample-based posterior mean matches the mixing-measure form") {
  // Atoms used as a uniform discrete measure: the sample form at time t is
  // the mixing-measure form with those atoms at variance t.
  std::mt19937_64 gen(31);
  std::normal_distribution<double> normal;
  PointSet atoms(40, 2);
  for (Eigen::Index i = 0; i < atoms.rows(); ++i) atoms.row(i) << normal(gen), 2.0 * normal(gen);
  MixtureSpec as_q;
  as_q.n = 2;
  as_q.sigma0_sq = 1.0;
  for (Eigen::Index i = 0; i < atoms.rows(); ++i) as_q.components.push_back({point(atoms, i), 1.0 / 40});
  for (int trial = 0; trial < 20; ++trial) {
    const Vector y = vec({3.0 * normal(gen), 3.0 * normal(gen)});
    const double t = 0.2 + 0.3 * trial;
    const Vector p_form = empirical_posterior_mean(atoms, y, t);
    const Vector q_form = posterior_mean(as_q, y, t);
    CHECK((p_form - q_form).norm() <= 1e-8);
  }

  // With many P_0 samples the sample form approximates E[X | Y = y] = y + t * score.
  const auto spec = symmetric_pair(1.5);
  const PointSet xs = sample_mixture(spec, 200000, 3);
  for (double y : {-2.0, 0.5, 1.0}) {
    const double t = 0.7;
    const double expected = y + t * exact_score(spec, vec({y}), t)[0];
    CHECK(std::abs(empirical_posterior_mean(xs, vec({y}), t)[0] - expected) < 0.03);
  }
}

TEST_CASE("second moment") {
  const auto spec = from_means({{3.0, 0.0}, {0.0, -1.0}}, 0.5);
  CHECK(spec.second_moment() == doctest::Approx(0.5 * 9 + 0.5 * 1 + 2 * 0.5));
}
