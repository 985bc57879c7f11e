#pragma once

#include <vector>

namespace gmdiffuse {

/// Increasing noise times t_1 < ... < t_N = T for the variance-exploding
/// process, together with the constants they were built from.
struct NoiseSchedule {
  std::vector<double> times;
  double kappa = 0.0;
  double T = 0.0;
  double eps = 0.0;
  double M2 = 0.0;
  int n = 1;
  /// eps_k^2 = eps^2 (t_k + 1) / ln(T + 1), one per time.
  std::vector<double> eps_budgets;

  std::size_t size() const { return times.size(); }
  /// 1-based level accessor matching the t_1..t_N numbering.
  double time(std::size_t level) const { return times.at(level - 1); }
};

/// Multiplier m(t) with t_prev + 1 = (t_next + 1) m(t_next) at equality:
/// max{e^{-2 kappa}, (t_next + 1)^{-kappa}}.
double step_ratio(double t_next, double kappa);

/// Smallest time t_1 = eps^2 sigma0^2 / (2 sqrt(n)).
double first_time(double eps, double sigma0_sq, int n);

/// T = (M2 + n)/eps^2, kappa = eps^2/(M2 + n ln(T+1)); times generated down
/// from T by the equality recursion and clamped to t_1 at the bottom.
NoiseSchedule build_schedule(double eps, double sigma0_sq, int n, double M2);

/// Schedule over caller-supplied increasing times (kappa and budgets are
/// left for the caller to fill if needed).
NoiseSchedule schedule_from_times(std::vector<double> times);

/// Score coefficient of one reverse step from t_next down to t_prev:
/// 2[(t_next + 1) - sqrt((t_prev + 1)(t_next + 1))].
double reverse_step_coefficient(double t_prev, double t_next);

/// Throws std::invalid_argument unless times are finite, positive and
/// strictly increasing.
void check_times(const std::vector<double>& times);

}  // namespace gmdiffuse
