#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "gmdiffuse/hermite.hpp"
#include "gmdiffuse/mixture_model.hpp"
#include "gmdiffuse/score_model.hpp"
#include "gmdiffuse/types.hpp"

namespace gmdiffuse {

/// Monte-Carlo estimate of E_{P_t} ||grad ln p_t - s||^2.
struct ScoreErrorReport {
  double t = 0.0;
  std::size_t mc_count = 0;
  double estimate = 0.0;
  double std_error = 0.0;  // jackknife
  /// E_{P_t} ||grad ln p_t||^2 on the same draws, for relative errors.
  double reference = 0.0;

  /// sqrt(estimate / reference).
  double relative() const;
};

ScoreErrorReport score_l2_error(const ScoreModel& model, const MixtureSpec& spec, double t,
                                std::size_t mc_count, std::uint64_t seed);

/// Jackknife standard error of the mean of `values`.
double jackknife_std_error(const std::vector<double>& values);

/// Orthonormal Hermite coefficients a_k = <f(. + center), h_k>_{N(0, sigma^2 I)}
/// computed by tensor Gauss-Hermite quadrature (n <= 2).
struct SpectrumReport {
  int n = 1;
  double sigma_sq = 1.0;
  Vector center;
  int d_max = 0;
  std::vector<MultiIndex> indices;
  Matrix coefficients;  // |indices| x n
  /// tails[d] = sum over d <= |k| <= d_max of ||a_k||^2, for d = 0..d_max+1.
  std::vector<double> tails;

  // Quadrature data kept for truncation checks.
  std::vector<double> nodes;    // standard-normal nodes, one axis
  std::vector<double> weights;  // matching weights
  Matrix values;                // f at each tensor grid point, row per point
};

using VectorFunction = std::function<Vector(PointRef)>;

/// Default per-axis node count: max(2 d_max + 1, 200) for n = 1 and
/// max(2 d_max + 1, 100) for n = 2.
int spectrum_nodes(int n, int d_max);

SpectrumReport hermite_coefficient_spectrum(const MixtureSpec& spec, double sigma_sq,
                                            PointRef center, int d_max, int nodes = 0);

/// Same for an arbitrary f: R^n -> R^n.
SpectrumReport hermite_coefficient_spectrum(const VectorFunction& f, int n, double sigma_sq,
                                            PointRef center, int d_max, int nodes = 0);

/// (tail sum at d, quadrature L^2 error of the degree < d truncation).
std::pair<double, double> truncation_check(const SpectrumReport& report, int d);

/// sigma^2 sqrt(n) / (sqrt(2) sigma0^2).
double tv_upper_bound(double sigma_sq, double sigma0_sq, int n);

/// Total variation between two 1D densities by adaptive Gauss-Kronrod
/// quadrature on [lo, hi], split at the sign changes of p - q.
double integrate_tv_1d(const std::function<double(double)>& p,
                       const std::function<double(double)>& q, double lo, double hi);

/// TV(N(0, var_a), N(0, var_b)) by numerical integration.
double gaussian_tv_numeric(double var_a, double var_b);

struct ChangeOfMeasureVerdict {
  double lhs = 0.0;             // closed form e^{a(a+1) mu^2 / 2}
  double lhs_quadrature = 0.0;  // same integral by Gauss-Hermite
  double bound = 0.0;           // e^{a(a+1) R^2 / 2}
  bool holds = false;
};

/// Checks int (dP/dgamma)^{1+a} dgamma <= e^{a(1+a)R^2/2} for P = N(mu, 1),
/// |mu| <= R, using `nodes` Gauss-Hermite nodes for the quadrature side.
ChangeOfMeasureVerdict change_of_measure_check(double R, double a, double mu, int nodes = 64);

struct ClusterMetrics {
  double generated_weight = 0.0;
  double reference_weight = 0.0;
  double weight_error = 0.0;
  Vector generated_mean;
  Vector reference_mean;
  double mean_error = 0.0;  // infinite if exactly one side is empty
};

struct SampleQuality {
  std::vector<ClusterMetrics> clusters;
  double sliced_w1 = 0.0;
  double max_weight_error = 0.0;
  double max_mean_error = 0.0;
};

/// W1 between two empirical 1D distributions.
double wasserstein1_1d(std::vector<double> a, std::vector<double> b);

/// Nearest-mean cluster statistics and sliced W1 over `directions` random
/// unit directions drawn from `direction_seed`.
SampleQuality sample_quality_metrics(const PointSet& generated, const PointSet& reference,
                                     const PointSet& cluster_means,
                                     std::uint64_t direction_seed = 0, int directions = 64);

struct VpVeVerdict {
  std::vector<double> times;
  double max_mean_gap = 0.0;
  double max_var_gap = 0.0;
  bool matches = false;
};

/// Compares the closed-form marginals of the OU process x_t and of
/// e^{-t} y_{e^{2t}-1} for the Brownian process y started from the same
/// Gaussian, on t = 0, ln 2 and ten random times.
VpVeVerdict vp_ve_equivalence_check(std::uint64_t seed);

}  // namespace gmdiffuse
