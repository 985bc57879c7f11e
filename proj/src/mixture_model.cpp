#include "gmdiffuse/mixture_model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gmdiffuse/rng.hpp"
#include "gmdiffuse/set_cover.hpp"

namespace gmdiffuse {
namespace {

// Softmax over logits log_prior_j + <y, mu_j>/s2 - |mu_j|^2/(2 s2), computed
// with max subtraction. The y-only term |y|^2/(2 s2) cancels.
Vector softmax_weights(const PointSet& means, const Vector& log_prior, PointRef y,
                       double sigma_sq) {
  const Eigen::Index k = means.rows();
  Vector logits(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto mu = point(means, j);
    logits[j] = log_prior[j] + (y.dot(mu) - 0.5 * mu.squaredNorm()) / sigma_sq;
  }
  const double top = logits.maxCoeff();
  Vector w = (logits.array() - top).exp();
  return w / w.sum();
}

Vector log_weights(const MixtureSpec& spec) {
  Vector lw(static_cast<Eigen::Index>(spec.components.size()));
  for (std::size_t j = 0; j < spec.components.size(); ++j) {
    lw[static_cast<Eigen::Index>(j)] = std::log(spec.components[j].weight);
  }
  return lw;
}

}  // namespace

void MixtureSpec::validate() const {
  if (n < 1) throw std::invalid_argument("mixture: dimension n must be >= 1");
  if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) {
    throw std::invalid_argument("mixture: sigma0_sq must be positive and finite");
  }
  if (components.empty()) throw std::invalid_argument("mixture: no components");
  double total = 0.0;
  for (std::size_t j = 0; j < components.size(); ++j) {
    const auto& c = components[j];
    if (c.mean.size() != n) {
      throw std::invalid_argument("mixture: component " + std::to_string(j) +
                                  " mean has wrong dimension");
    }
    if (!c.mean.allFinite()) {
      throw std::invalid_argument("mixture: component " + std::to_string(j) +
                                  " mean is not finite");
    }
    if (!(c.weight > 0.0 && c.weight <= 1.0)) {
      throw std::invalid_argument("mixture: component " + std::to_string(j) +
                                  " weight outside (0, 1]");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("mixture: weights sum to " + std::to_string(total) + ", not 1");
  }
  const auto& p = locality;
  if (!(p.R0 > 0.0) || !(p.D > 0.0) || p.k < 1 || !(p.alpha_min > 0.0 && p.alpha_min <= 1.0)) {
    throw std::invalid_argument("mixture: locality parameters out of range");
  }
}

PointSet MixtureSpec::means() const {
  PointSet m(static_cast<Eigen::Index>(components.size()), n);
  for (std::size_t j = 0; j < components.size(); ++j) {
    m.row(static_cast<Eigen::Index>(j)) = components[j].mean.transpose();
  }
  return m;
}

Vector MixtureSpec::weights() const {
  Vector w(static_cast<Eigen::Index>(components.size()));
  for (std::size_t j = 0; j < components.size(); ++j) {
    w[static_cast<Eigen::Index>(j)] = components[j].weight;
  }
  return w;
}

double MixtureSpec::second_moment() const {
  double m2 = n * sigma0_sq;
  for (const auto& c : components) m2 += c.weight * c.mean.squaredNorm();
  return m2;
}

std::vector<LocalityViolation> validate_k_locality(const MixtureSpec& spec) {
  std::vector<LocalityViolation> report;
  const auto& p = spec.locality;
  const PointSet means = spec.means();
  const Eigen::Index k = means.rows();

  if (p.alpha_min > 1.0 / p.k) {
    report.push_back({LocalityClause::parameters, "alpha_min exceeds 1/k"});
  }
  if (p.R0 < 1.0) report.push_back({LocalityClause::parameters, "R0 below 1"});

  for (Eigen::Index j = 0; j < k; ++j) {
    double mass = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if ((means.row(i) - means.row(j)).norm() <= p.R0) {
        mass += spec.components[static_cast<std::size_t>(i)].weight;
      }
    }
    if (mass < p.alpha_min) {
      std::ostringstream os;
      os << "atom " << j << " has mass " << mass << " within R0, below alpha_min " << p.alpha_min;
      report.push_back({LocalityClause::min_mass, os.str()});
    }
  }

  const auto cover = greedy_cover(means, p.R0, static_cast<std::size_t>(k));
  if (cover.selected.size() > static_cast<std::size_t>(p.k)) {
    std::ostringstream os;
    os << "greedy cover needs " << cover.selected.size() << " balls of radius R0, k = " << p.k;
    report.push_back({LocalityClause::ball_cover, os.str()});
  }

  for (Eigen::Index j = 0; j < k; ++j) {
    const double norm = means.row(j).norm();
    if (norm > p.D) {
      std::ostringstream os;
      os << "atom " << j << " has norm " << norm << " > D = " << p.D;
      report.push_back({LocalityClause::support_radius, os.str()});
    }
  }
  return report;
}

bool has_violation(const std::vector<LocalityViolation>& report, LocalityClause clause) {
  for (const auto& v : report) {
    if (v.clause == clause) return true;
  }
  return false;
}

PointSet sample_mixture(const MixtureSpec& spec, std::size_t count, std::uint64_t seed) {
  PointSet out(static_cast<Eigen::Index>(count), spec.n);
  if (count == 0) return out;
  const double sigma0 = std::sqrt(spec.sigma0_sq);
  std::vector<double> w;
  for (const auto& c : spec.components) w.push_back(c.weight);

  const auto chunks = static_cast<std::ptrdiff_t>((count + kStreamChunk - 1) / kStreamChunk);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t chunk = 0; chunk < chunks; ++chunk) {
    auto gen = make_stream(seed, static_cast<std::uint64_t>(chunk));
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::normal_distribution<double> normal;
    const std::size_t begin = static_cast<std::size_t>(chunk) * kStreamChunk;
    const std::size_t end = std::min(count, begin + kStreamChunk);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& mean = spec.components[pick(gen)].mean;
      for (int c = 0; c < spec.n; ++c) {
        out(static_cast<Eigen::Index>(i), c) = mean[c] + sigma0 * normal(gen);
      }
    }
  }
  return out;
}

MixtureOracle::MixtureOracle(const MixtureSpec& spec)
    : means_(spec.means()), log_weights_(log_weights(spec)), sigma0_sq_(spec.sigma0_sq) {}

Vector MixtureOracle::posterior_weights(PointRef y, double sigma_sq) const {
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("posterior_weights: sigma_sq must be positive");
  return softmax_weights(means_, log_weights_, y, sigma_sq);
}

Vector MixtureOracle::posterior_mean(PointRef y, double sigma_sq) const {
  return means_.transpose() * posterior_weights(y, sigma_sq);
}

Vector MixtureOracle::score(PointRef y, double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("exact_score: t must be nonnegative");
  const double sigma_sq = t + sigma0_sq_;
  return (posterior_mean(y, sigma_sq) - y) / sigma_sq;
}

Vector posterior_weights(const MixtureSpec& spec, PointRef y, double sigma_sq) {
  return MixtureOracle(spec).posterior_weights(y, sigma_sq);
}

Vector posterior_mean(const MixtureSpec& spec, PointRef y, double sigma_sq) {
  return MixtureOracle(spec).posterior_mean(y, sigma_sq);
}

Vector exact_score(const MixtureSpec& spec, PointRef y, double t) {
  return MixtureOracle(spec).score(y, t);
}

double log_density(const MixtureSpec& spec, PointRef y, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("log_density: t must be nonnegative");
  const double sigma_sq = t + spec.sigma0_sq;
  const std::size_t k = spec.components.size();
  std::vector<double> terms(k);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    const auto& c = spec.components[j];
    terms[j] = std::log(c.weight) - 0.5 * (y - c.mean).squaredNorm() / sigma_sq;
    top = std::max(top, terms[j]);
  }
  double acc = 0.0;
  for (double v : terms) acc += std::exp(v - top);
  return top + std::log(acc) - 0.5 * spec.n * std::log(2.0 * std::numbers::pi * sigma_sq);
}

Vector empirical_posterior_mean(const PointSet& atoms, PointRef y, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("empirical_posterior_mean: t must be positive");
  if (atoms.rows() == 0) throw std::invalid_argument("empirical_posterior_mean: no atoms");
  const Vector prior = Vector::Zero(atoms.rows());
  const Vector w = softmax_weights(atoms, prior, y, t);
  return atoms.transpose() * w;
}

}  // namespace gmdiffuse
