#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "gmdiffuse/mixture_model.hpp"

namespace gmdiffuse::test {

inline MixtureSpec point_mass(const Vector& mu, double sigma0_sq = 1.0) {
  MixtureSpec s;
  s.n = static_cast<int>(mu.size());
  s.sigma0_sq = sigma0_sq;
  s.components.push_back({mu, 1.0});
  s.locality = {1.0, 1.0, std::max(1.0, mu.norm() + 1.0), 1};
  return s;
}

inline MixtureSpec origin_mass(int n, double sigma0_sq = 1.0) { return point_mass(Vector::Zero(n), sigma0_sq); }

/// 1D pair +-mu with equal weights.
inline MixtureSpec symmetric_pair(double mu, double sigma0_sq = 1.0) {
  MixtureSpec s;
  s.n = 1;
  s.sigma0_sq = sigma0_sq;
  s.components.push_back({Vector::Constant(1, mu), 0.5});
  s.components.push_back({Vector::Constant(1, -mu), 0.5});
  s.locality = {1.0, 0.5, std::abs(mu) + 1.0, 2};
  return s;
}

inline MixtureSpec from_means(const std::vector<std::vector<double>>& means, double sigma0_sq = 1.0) {
  MixtureSpec s;
  s.n = static_cast<int>(means.front().size());
  s.sigma0_sq = sigma0_sq;
  double D = 1.0;
  for (const auto& m : means) {
    Vector v = Eigen::Map<const Vector>(m.data(), static_cast<Eigen::Index>(m.size()));
    D = std::max(D, v.norm());
    s.components.push_back({v, 1.0 / static_cast<double>(means.size())});
  }
  s.locality = {1.0, 1.0 / static_cast<double>(means.size()), D, static_cast<int>(means.size())};
  return s;
}

/// Random discrete mixture with k atoms in [-3, 3]^n and Dirichlet-ish weights.
inline MixtureSpec random_mixture(std::mt19937_64& gen, int k, int n) {
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_real_distribution<double> wdist(0.2, 1.0);
  std::uniform_real_distribution<double> sdist(0.3, 2.0);
  MixtureSpec s;
  s.n = n;
  s.sigma0_sq = sdist(gen);
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    Vector m(n);
    for (int i = 0; i < n; ++i) m[i] = coord(gen);
    const double w = wdist(gen);
    total += w;
    s.components.push_back({m, w});
  }
  for (auto& c : s.components) c.weight /= total;
  s.locality = {1.0, 1.0 / k, 3.0 * std::sqrt(double(n)) + 1.0, k};
  return s;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline double sample_variance(const PointSet& p, Eigen::Index col) {
  const double mean = p.col(col).mean();
  return (p.col(col).array() - mean).square().sum() / static_cast<double>(p.rows() - 1);
}

}  // namespace gmdiffuse::test
