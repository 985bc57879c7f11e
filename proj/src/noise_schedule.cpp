#include "gmdiffuse/noise_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmdiffuse/logging.hpp"

namespace gmdiffuse {

double step_ratio(double t_next, double kappa) {
  return std::max(std::exp(-2.0 * kappa), std::pow(t_next + 1.0, -kappa));
}

double first_time(double eps, double sigma0_sq, int n) {
  return eps * eps * sigma0_sq / (2.0 * std::sqrt(static_cast<double>(n)));
}

NoiseSchedule build_schedule(double eps, double sigma0_sq, int n, double M2) {
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("build_schedule: eps must lie in (0, 1/2]");
  if (!(sigma0_sq > 0.0)) throw std::invalid_argument("build_schedule: sigma0_sq must be positive");
  if (n < 1) throw std::invalid_argument("build_schedule: n must be >= 1");
  if (!(M2 >= 0.0)) throw std::invalid_argument("build_schedule: M2 must be nonnegative");

  NoiseSchedule s;
  s.eps = eps;
  s.M2 = M2;
  s.n = n;
  s.T = (M2 + n) / (eps * eps);
  s.kappa = eps * eps / (M2 + n * std::log(s.T + 1.0));
  const double t1 = first_time(eps, sigma0_sq, n);
  if (!(s.T > t1)) throw std::invalid_argument("build_schedule: T <= t_1, schedule would be empty");

  std::vector<double> down{s.T};
  for (;;) {
    const double next = down.back();
    const double prev = (next + 1.0) * step_ratio(next, s.kappa) - 1.0;
    if (prev < t1) break;
    down.push_back(prev);
  }
  if (down.back() != t1) down.push_back(t1);
  s.times.assign(down.rbegin(), down.rend());

  const double log_T1 = std::log(s.T + 1.0);
  for (double t : s.times) s.eps_budgets.push_back(eps * eps * (t + 1.0) / log_T1);
  log::debug("schedule: N={} T={} kappa={} t_1={}", s.times.size(), s.T, s.kappa, t1);
  return s;
}

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("schedule: no times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !(times[i] > 0.0)) {
      throw std::invalid_argument("schedule: times must be positive and finite");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("schedule: times must be strictly increasing");
    }
  }
}

NoiseSchedule schedule_from_times(std::vector<double> times) {
  check_times(times);
  NoiseSchedule s;
  s.T = times.back();
  s.times = std::move(times);
  return s;
}

double reverse_step_coefficient(double t_prev, double t_next) {
  if (!(t_prev >= 0.0)) throw std::invalid_argument("reverse_step_coefficient: t_prev must be >= 0");
  if (t_prev > t_next) throw std::invalid_argument("reverse_step_coefficient: t_prev > t_next");
  const double a = t_next + 1.0;
  const double b = t_prev + 1.0;
  // 2 sqrt(a) (sqrt(a) - sqrt(b)) written without cancellation.
  const double sa = std::sqrt(a);
  return 2.0 * sa * (a - b) / (sa + std::sqrt(b));
}

}  // namespace gmdiffuse
