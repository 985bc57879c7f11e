#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmdiffuse/types.hpp"

namespace gmdiffuse {

/// k-locality parameters of the mixing measure: k balls of radius R0, each
/// support point carrying at least alpha_min mass nearby, all inside B_D(0).
struct KLocalityParams {
  double R0 = 1.0;
  double alpha_min = 1.0;
  double D = 1.0;
  int k = 1;
};

struct Component {
  Vector mean;
  double weight = 1.0;
};

/// P_0 = Q_0 * N(0, sigma0_sq I_n) with Q_0 a finite list of weighted atoms.
struct MixtureSpec {
  int n = 1;
  double sigma0_sq = 1.0;
  std::vector<Component> components;
  KLocalityParams locality;

  /// Throws std::invalid_argument on structural problems (dimension
  /// mismatch, non-finite means, weights not summing to one, ...).
  void validate() const;

  /// Means stacked as rows.
  PointSet means() const;
  Vector weights() const;
  /// E||x||^2 under P_0.
  double second_moment() const;
};

enum class LocalityClause {
  min_mass,        // some atom has < alpha_min mass within R0
  ball_cover,      // atoms not coverable by k balls of radius R0
  support_radius,  // some atom outside B_D(0)
  parameters,      // alpha_min > 1/k or R0 < 1
};

struct LocalityViolation {
  LocalityClause clause;
  std::string detail;
};

std::vector<LocalityViolation> validate_k_locality(const MixtureSpec& spec);

bool has_violation(const std::vector<LocalityViolation>& report, LocalityClause clause);

/// Draws `count` points mu + sigma0 xi. Points are generated in chunks of
/// kStreamChunk from independent streams, so a prefix of the output does not
/// depend on `count`.
PointSet sample_mixture(const MixtureSpec& spec, std::size_t count, std::uint64_t seed);

/// Posterior component probabilities P(mu_j | Y = y) for Y = mu + sigma xi.
Vector posterior_weights(const MixtureSpec& spec, PointRef y, double sigma_sq);

/// f_{sigma^2}(y) = E[mu | Y = y].
Vector posterior_mean(const MixtureSpec& spec, PointRef y, double sigma_sq);

/// Gradient of ln p_t at y, where p_t is the density of P_0 * N(0, t I).
Vector exact_score(const MixtureSpec& spec, PointRef y, double t);

double log_density(const MixtureSpec& spec, PointRef y, double t);

/// Exact oracles for a discrete mixing measure with the atom table cached,
/// for use inside sampling and Monte-Carlo loops.
class MixtureOracle {
 public:
  explicit MixtureOracle(const MixtureSpec& spec);

  int dimension() const { return static_cast<int>(means_.cols()); }
  double sigma0_sq() const { return sigma0_sq_; }
  const PointSet& means() const { return means_; }

  Vector posterior_weights(PointRef y, double sigma_sq) const;
  Vector posterior_mean(PointRef y, double sigma_sq) const;
  Vector score(PointRef y, double t) const;

 private:
  PointSet means_;
  Vector log_weights_;
  double sigma0_sq_;
};

/// E[X | Y = y] for X drawn uniformly from `atoms` and Y = X + sqrt(t) xi.
/// With atoms sampled from P_0 this is the sample-based form of the
/// posterior mean used by the denoising objective.
Vector empirical_posterior_mean(const PointSet& atoms, PointRef y, double t);

}  // namespace gmdiffuse
