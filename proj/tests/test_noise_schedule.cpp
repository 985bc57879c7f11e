#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "gmdiffuse/noise_schedule.hpp"

using namespace gmdiffuse;

TEST_CASE("single recursion steps") {
  // From t = 3 with kappa = 1/2: (t+1)^{-kappa} = 0.5 beats e^{-1}.
  CHECK(step_ratio(3.0, 0.5) == doctest::Approx(0.5));
  CHECK(4.0 * step_ratio(3.0, 0.5) - 1.0 == doctest::Approx(1.0));
  // Large-time regime: e^{-2 kappa} wins past t + 1 = e^{2}.
  const double big = std::exp(4.0) - 1.0;
  CHECK((big + 1.0) * step_ratio(big, 0.5) == doctest::Approx(std::exp(3.0)));
}

TEST_CASE("schedule construction invariants") {
  for (double eps : {0.1, 0.3, 0.5}) {
    for (int n : {1, 2, 10}) {
      for (double M2 : {0.0, 3.0, 50.0}) {
        const double s0 = 1.0;
        const auto s = build_schedule(eps, s0, n, M2);
        CHECK(s.times.front() == first_time(eps, s0, n));
        CHECK(s.times.back() == s.T);
        CHECK(s.T == doctest::Approx((M2 + n) / (eps * eps)));
        CHECK(s.kappa == doctest::Approx(eps * eps / (M2 + n * std::log(s.T + 1.0))));
        CHECK(std::abs(s.times.front() - eps * eps * s0 / (2.0 * std::sqrt(double(n)))) <= 1e-12);
        CHECK(s.eps_budgets.size() == s.size());
        double telescoped = 0.0;
        for (std::size_t k = 0; k + 1 < s.size(); ++k) {
          const double lo = s.times[k] + 1.0, hi = s.times[k + 1] + 1.0;
          REQUIRE(s.times[k] < s.times[k + 1]);
          const double floor = hi * step_ratio(s.times[k + 1], s.kappa);
          CHECK(lo >= floor * (1.0 - 1e-14));
          if (k > 0) CHECK(std::abs(lo - floor) <= 1e-12 * hi);
          telescoped += std::log(hi / lo);
        }
        CHECK(telescoped == doctest::Approx(std::log((s.T + 1.0) / (s.times.front() + 1.0))).epsilon(1e-10));
        const double bound = 5.0 / s.kappa * std::log((s.T + 1.0) / s.times.front());
        CHECK(static_cast<double>(s.size()) <= bound);
        for (std::size_t k = 0; k < s.size(); ++k) {
          CHECK(s.eps_budgets[k] <= eps * eps * (s.times[k] + 1.0) / std::log(s.T + 1.0) * (1 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("schedule rejects bad parameters") {
  CHECK_THROWS_AS(build_schedule(0.0, 1.0, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_schedule(0.6, 1.0, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_schedule(0.5, 1e6, 1, 0.0), std::invalid_argument);  // T <= t_1
  CHECK_THROWS_AS(check_times({0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(check_times({-1.0, 0.5}), std::invalid_argument);
  CHECK_NOTHROW(schedule_from_times({0.5, 1.0, 3.0}));
}

TEST_CASE("reverse step coefficient") {
  CHECK(reverse_step_coefficient(2.0, 2.0) == 0.0);
  CHECK(reverse_step_coefficient(0.0, 3.0) == doctest::Approx(4.0));
  const double gap = 1e-6;
  CHECK(reverse_step_coefficient(5.0, 5.0 + gap) / gap == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(reverse_step_coefficient(3.0, 2.0), std::invalid_argument);
  for (double a = 0.0; a < 50.0; a += 3.7) {
    CHECK(reverse_step_coefficient(a, a + 1e-9) > 0.0);
    for (double g : {0.01, 1.0, 40.0}) {
      const double c = reverse_step_coefficient(a, a + g);
      CHECK(c > 0.0);
      const double naive = 2.0 * ((a + g + 1.0) - std::sqrt((a + 1.0) * (a + g + 1.0)));
      CHECK(c == doctest::Approx(naive).epsilon(1e-6));
    }
  }
}
