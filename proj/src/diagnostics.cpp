#include "gmdiffuse/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gmdiffuse/kernels.hpp"
#include "gmdiffuse/quadrature.hpp"
#include "gmdiffuse/rng.hpp"
#include "gmdiffuse/score_regression.hpp"

namespace gmdiffuse {

double ScoreErrorReport::relative() const {
  return reference > 0.0 ? std::sqrt(estimate / reference) : std::numeric_limits<double>::infinity();
}

double jackknife_std_error(const std::vector<double>& values) {
  const std::size_t m = values.size();
  if (m < 2) return 0.0;
  double total = 0.0;
  for (double v : values) total += v;
  const double md = static_cast<double>(m);
  double mean_loo = 0.0;
  std::vector<double> loo(m);
  for (std::size_t i = 0; i < m; ++i) {
    loo[i] = (total - values[i]) / (md - 1.0);
    mean_loo += loo[i];
  }
  mean_loo /= md;
  double ss = 0.0;
  for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
  return std::sqrt((md - 1.0) / md * ss);
}

ScoreErrorReport score_l2_error(const ScoreModel& model, const MixtureSpec& spec, double t,
                                std::size_t mc_count, std::uint64_t seed) {
  ScoreErrorReport r;
  r.t = t;
  r.mc_count = mc_count;
  if (mc_count == 0) return r;
  const PointSet xs = sample_mixture(spec, mc_count, derive_seed(seed, 0));
  const PointSet ys = add_gaussian_noise(xs, t, derive_seed(seed, 1));
  const MixtureOracle oracle(spec);
  const OracleScore truth(oracle, t);
  const PointSet exact = score_batch(truth, ys);
  const PointSet est = score_batch(model, ys);
  std::vector<double> err(mc_count);
  double ref = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < mc_count; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    err[i] = (exact.row(row) - est.row(row)).squaredNorm();
    sum += err[i];
    ref += exact.row(row).squaredNorm();
  }
  r.estimate = sum / static_cast<double>(mc_count);
  r.reference = ref / static_cast<double>(mc_count);
  r.std_error = jackknife_std_error(err);
  return r;
}

int spectrum_nodes(int n, int d_max) {
  return std::max(2 * d_max + 1, n == 1 ? 200 : 100);
}

SpectrumReport hermite_coefficient_spectrum(const MixtureSpec& spec, double sigma_sq,
                                            PointRef center, int d_max, int nodes) {
  const MixtureOracle oracle(spec);
  return hermite_coefficient_spectrum(
      [&](PointRef y) { return oracle.posterior_mean(y, sigma_sq); }, spec.n, sigma_sq, center,
      d_max, nodes);
}

namespace {

// Orthonormal He_k(x)/sqrt(k!) for k = 0..d at every node, row per node.
Matrix orthonormal_table(const std::vector<double>& nodes, int d) {
  Matrix tab(static_cast<Eigen::Index>(nodes.size()), d + 1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double x = nodes[i];
    const auto r = static_cast<Eigen::Index>(i);
    tab(r, 0) = 1.0;
    if (d >= 1) tab(r, 1) = x;
    for (int k = 2; k <= d; ++k) {
      tab(r, k) = (x * tab(r, k - 1) - std::sqrt(k - 1.0) * tab(r, k - 2)) / std::sqrt(double(k));
    }
  }
  return tab;
}

// Tensor grid point g -> per-axis node indices (axis 0 varies slowest).
void grid_coords(std::size_t g, int n, std::size_t per_axis, std::vector<std::size_t>& out) {
  for (int axis = n - 1; axis >= 0; --axis) {
    out[static_cast<std::size_t>(axis)] = g % per_axis;
    g /= per_axis;
  }
}

}  // namespace

SpectrumReport hermite_coefficient_spectrum(const VectorFunction& f, int n, double sigma_sq,
                                            PointRef center, int d_max, int nodes) {
  if (n < 1 || n > 2) throw std::invalid_argument("spectrum: only n <= 2 is supported");
  if (d_max < 0 || d_max > 60) throw std::invalid_argument("spectrum: d_max must lie in [0, 60]");
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("spectrum: sigma_sq must be positive");
  if (center.size() != n) throw std::invalid_argument("spectrum: center has wrong dimension");
  if (nodes <= 0) nodes = spectrum_nodes(n, d_max);
  if (nodes < 2 * d_max + 1) throw std::invalid_argument("spectrum: need at least 2 d_max + 1 nodes");

  SpectrumReport rep;
  rep.n = n;
  rep.sigma_sq = sigma_sq;
  rep.center = center;
  rep.d_max = d_max;
  rep.indices = enumerate_multi_indices(n, d_max);
  const auto rule = gauss_hermite(nodes);
  rep.nodes = rule.nodes;
  rep.weights = rule.weights;

  const double sigma = std::sqrt(sigma_sq);
  const auto per_axis = static_cast<std::size_t>(nodes);
  std::size_t grid = 1;
  for (int i = 0; i < n; ++i) grid *= per_axis;

  rep.values.resize(static_cast<Eigen::Index>(grid), n);
  std::vector<double> grid_weight(grid);
  for_each_index(grid, Exec::parallel, [&](std::size_t g) {
    std::vector<std::size_t> c(static_cast<std::size_t>(n));
    grid_coords(g, n, per_axis, c);
    Vector y(n);
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      y[i] = center[i] + sigma * rule.nodes[c[static_cast<std::size_t>(i)]];
      w *= rule.weights[c[static_cast<std::size_t>(i)]];
    }
    grid_weight[g] = w;
    const Vector v = f(y);
    if (v.size() != n) throw std::runtime_error("spectrum: f returned wrong dimension");
    rep.values.row(static_cast<Eigen::Index>(g)) = v.transpose();
  });

  const Matrix table = orthonormal_table(rule.nodes, d_max);
  rep.coefficients = Matrix::Zero(static_cast<Eigen::Index>(rep.indices.size()), n);
  for_each_index(rep.indices.size(), Exec::parallel, [&](std::size_t k) {
    const auto& e = rep.indices[k].entries;
    std::vector<std::size_t> c(static_cast<std::size_t>(n));
    Vector acc = Vector::Zero(n);
    for (std::size_t g = 0; g < grid; ++g) {
      grid_coords(g, n, per_axis, c);
      double h = grid_weight[g];
      for (int i = 0; i < n; ++i) {
        h *= table(static_cast<Eigen::Index>(c[static_cast<std::size_t>(i)]), e[static_cast<std::size_t>(i)]);
      }
      acc += h * rep.values.row(static_cast<Eigen::Index>(g)).transpose();
    }
    rep.coefficients.row(static_cast<Eigen::Index>(k)) = acc.transpose();
  });

  std::vector<double> by_degree(static_cast<std::size_t>(d_max) + 1, 0.0);
  for (std::size_t k = 0; k < rep.indices.size(); ++k) {
    by_degree[static_cast<std::size_t>(rep.indices[k].degree())] +=
        rep.coefficients.row(static_cast<Eigen::Index>(k)).squaredNorm();
  }
  rep.tails.assign(static_cast<std::size_t>(d_max) + 2, 0.0);
  for (int d = d_max; d >= 0; --d) {
    rep.tails[static_cast<std::size_t>(d)] =
        rep.tails[static_cast<std::size_t>(d) + 1] + by_degree[static_cast<std::size_t>(d)];
  }
  return rep;
}

std::pair<double, double> truncation_check(const SpectrumReport& report, int d) {
  if (d < 0 || d > report.d_max + 1) throw std::invalid_argument("truncation_check: d out of range");
  const int n = report.n;
  const auto per_axis = report.nodes.size();
  const Matrix table = orthonormal_table(report.nodes, report.d_max);
  const auto grid = static_cast<std::size_t>(report.values.rows());
  std::vector<double> err(grid);
  for_each_index(grid, Exec::parallel, [&](std::size_t g) {
    std::vector<std::size_t> c(static_cast<std::size_t>(n));
    grid_coords(g, n, per_axis, c);
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= report.weights[c[static_cast<std::size_t>(i)]];
    Vector approx = Vector::Zero(n);
    for (std::size_t k = 0; k < report.indices.size(); ++k) {
      const auto& e = report.indices[k].entries;
      if (report.indices[k].degree() >= d) continue;
      double h = 1.0;
      for (int i = 0; i < n; ++i) {
        h *= table(static_cast<Eigen::Index>(c[static_cast<std::size_t>(i)]), e[static_cast<std::size_t>(i)]);
      }
      approx += h * report.coefficients.row(static_cast<Eigen::Index>(k)).transpose();
    }
    err[g] = w * (report.values.row(static_cast<Eigen::Index>(g)).transpose() - approx).squaredNorm();
  });
  double total = 0.0;
  for (double v : err) total += v;
  return {report.tails[static_cast<std::size_t>(d)], total};
}

double tv_upper_bound(double sigma_sq, double sigma0_sq, int n) {
  if (!(sigma0_sq > 0.0)) throw std::invalid_argument("tv_upper_bound: sigma0_sq must be positive");
  return sigma_sq * std::sqrt(static_cast<double>(n)) / (std::numbers::sqrt2 * sigma0_sq);
}

double integrate_tv_1d(const std::function<double(double)>& p, const std::function<double(double)>& q,
                       double lo, double hi) {
  // Locate sign changes of p - q on a fine grid, refine by bisection, and
  // integrate |p - q| piecewise so every piece is smooth.
  constexpr int kGrid = 4000;
  auto diff = [&](double x) { return p(x) - q(x); };
  std::vector<double> breaks{lo};
  double prev_x = lo;
  double prev_v = diff(lo);
  for (int i = 1; i <= kGrid; ++i) {
    const double x = lo + (hi - lo) * i / kGrid;
    const double v = diff(x);
    if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
      double a = prev_x;
      double b = x;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        if ((diff(m) < 0.0) == (prev_v < 0.0)) {
          a = m;
        } else {
          b = m;
        }
      }
      breaks.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_v = v;
  }
  breaks.push_back(hi);
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    total += gauss_kronrod<double, 61>::integrate([&](double x) { return std::abs(diff(x)); },
                                                  breaks[i], breaks[i + 1], 30, 1e-14);
  }
  return 0.5 * total;
}

double gaussian_tv_numeric(double var_a, double var_b) {
  auto density = [](double var) {
    return [var](double x) { return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var); };
  };
  const double span = 40.0 * std::sqrt(std::max(var_a, var_b));
  return integrate_tv_1d(density(var_a), density(var_b), -span, span);
}

ChangeOfMeasureVerdict change_of_measure_check(double R, double a, double mu, int nodes) {
  if (!(R >= 0.0) || !(a >= 0.0)) throw std::invalid_argument("change_of_measure_check: R, a must be >= 0");
  if (std::abs(mu) > R) throw std::invalid_argument("change_of_measure_check: requires |mu| <= R");
  ChangeOfMeasureVerdict v;
  const double c = a * (a + 1.0) / 2.0;
  v.lhs = std::exp(c * mu * mu);
  v.bound = std::exp(c * R * R);
  // (dP/dgamma)(x) = exp(mu x - mu^2/2) for P = N(mu, 1).
  const auto rule = gauss_hermite(nodes);
  double q = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    q += rule.weights[i] * std::exp((1.0 + a) * (mu * rule.nodes[i] - 0.5 * mu * mu));
  }
  v.lhs_quadrature = q;
  v.holds = v.lhs <= v.bound * (1.0 + 1e-12);
  return v;
}

double wasserstein1_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1_1d: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  // Integrate |F_a^{-1}(u) - F_b^{-1}(u)| over the merged quantile breakpoints.
  std::size_t i = 0;
  std::size_t j = 0;
  double u = 0.0;
  double total = 0.0;
  while (i < a.size() && j < b.size()) {
    const double next_a = (i + 1) / na;
    const double next_b = (j + 1) / nb;
    const double next = std::min(next_a, next_b);
    total += (next - u) * std::abs(a[i] - b[j]);
    u = next;
    if (next_a <= next) ++i;
    if (next_b <= next) ++j;
  }
  return total;
}

SampleQuality sample_quality_metrics(const PointSet& generated, const PointSet& reference,
                                     const PointSet& cluster_means, std::uint64_t direction_seed,
                                     int directions) {
  if (generated.rows() == 0 || reference.rows() == 0) {
    throw std::invalid_argument("sample_quality_metrics: both sample sets must be nonempty");
  }
  if (generated.cols() != reference.cols() || cluster_means.cols() != generated.cols()) {
    throw std::invalid_argument("sample_quality_metrics: dimension mismatch");
  }
  if (cluster_means.rows() == 0) throw std::invalid_argument("sample_quality_metrics: no cluster means");
  const int n = static_cast<int>(generated.cols());
  const auto k = static_cast<std::size_t>(cluster_means.rows());

  struct Acc {
    std::vector<std::size_t> count;
    std::vector<Vector> sum;
  };
  auto accumulate = [&](const PointSet& pts) {
    Acc acc{std::vector<std::size_t>(k, 0), std::vector<Vector>(k, Vector::Zero(n))};
    const auto cells = assign_cells(cluster_means, pts);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      ++acc.count[cells[i]];
      acc.sum[cells[i]] += point(pts, static_cast<Eigen::Index>(i));
    }
    return acc;
  };
  const Acc g = accumulate(generated);
  const Acc r = accumulate(reference);

  SampleQuality q;
  for (std::size_t j = 0; j < k; ++j) {
    ClusterMetrics c;
    c.generated_weight = static_cast<double>(g.count[j]) / static_cast<double>(generated.rows());
    c.reference_weight = static_cast<double>(r.count[j]) / static_cast<double>(reference.rows());
    c.weight_error = std::abs(c.generated_weight - c.reference_weight);
    c.generated_mean = g.count[j] ? Vector(g.sum[j] / static_cast<double>(g.count[j])) : Vector::Zero(n);
    c.reference_mean = r.count[j] ? Vector(r.sum[j] / static_cast<double>(r.count[j])) : Vector::Zero(n);
    if (g.count[j] && r.count[j]) {
      c.mean_error = (c.generated_mean - c.reference_mean).norm();
    } else if (g.count[j] || r.count[j]) {
      c.mean_error = std::numeric_limits<double>::infinity();
    }
    q.max_weight_error = std::max(q.max_weight_error, c.weight_error);
    q.max_mean_error = std::max(q.max_mean_error, c.mean_error);
    q.clusters.push_back(std::move(c));
  }

  auto gen = make_stream(direction_seed, 0);
  std::normal_distribution<double> normal;
  double total = 0.0;
  for (int d = 0; d < directions; ++d) {
    Vector dir(n);
    for (int i = 0; i < n; ++i) dir[i] = normal(gen);
    dir.normalize();
    std::vector<double> pa(static_cast<std::size_t>(generated.rows()));
    std::vector<double> pb(static_cast<std::size_t>(reference.rows()));
    for (std::size_t i = 0; i < pa.size(); ++i) pa[i] = generated.row(static_cast<Eigen::Index>(i)).dot(dir.transpose());
    for (std::size_t i = 0; i < pb.size(); ++i) pb[i] = reference.row(static_cast<Eigen::Index>(i)).dot(dir.transpose());
    total += wasserstein1_1d(std::move(pa), std::move(pb));
  }
  q.sliced_w1 = directions > 0 ? total / directions : 0.0;
  return q;
}

VpVeVerdict vp_ve_equivalence_check(std::uint64_t seed) {
  auto gen = make_stream(seed, 0);
  std::uniform_real_distribution<double> mean_dist(-3.0, 3.0);
  std::uniform_real_distribution<double> var_dist(0.5, 2.0);
  std::uniform_real_distribution<double> time_dist(0.0, 3.0);
  const double m = mean_dist(gen);
  const double s2 = var_dist(gen);

  VpVeVerdict v;
  v.times = {0.0, std::numbers::ln2};
  for (int i = 0; i < 10; ++i) v.times.push_back(time_dist(gen));
  for (double t : v.times) {
    // OU: dx = -x dt + sqrt(2) dW from x_0 ~ N(m, s2).
    const double decay = std::exp(-t);
    const double vp_mean = decay * m;
    const double vp_var = decay * decay * s2 + (1.0 - decay * decay);
    // Brownian y_tau = y_0 + W_tau at tau = e^{2t} - 1, rescaled by e^{-t}.
    const double tau = std::expm1(2.0 * t);
    const double ve_mean = decay * m;
    const double ve_var = decay * decay * (s2 + tau);
    v.max_mean_gap = std::max(v.max_mean_gap, std::abs(vp_mean - ve_mean));
    v.max_var_gap = std::max(v.max_var_gap, std::abs(vp_var - ve_var));
  }
  v.matches = v.max_mean_gap <= 1e-10 && v.max_var_gap <= 1e-10;
  return v;
}

}  // namespace gmdiffuse
