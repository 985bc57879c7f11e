#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gmdiffuse/hermite.hpp"
#include "gmdiffuse/score_model.hpp"
#include "gmdiffuse/types.hpp"
#include "gmdiffuse/warm_starts.hpp"

namespace gmdiffuse {

/// Paired clean/noised samples for the denoising objective at time t.
struct DenoisingDataset {
  PointSet xs;
  PointSet ys;  // ys = xs + sqrt(t) xi
  double t = 0.0;
  double sigma_sq = 0.0;  // t + sigma0^2
  std::vector<std::size_t> cell_of;
};

/// xs + sqrt(t) xi with xi drawn in kStreamChunk-sized streams of `seed`.
PointSet add_gaussian_noise(const PointSet& xs, double t, std::uint64_t seed);

DenoisingDataset build_denoising_dataset(const PointSet& samples, double t, double sigma0_sq,
                                         const WarmStartSet& centers, std::uint64_t seed);

/// (1 - sigma^2/t) y_i + (sigma^2/t) x_i, whose conditional mean given y_i
/// is the posterior mean f_{sigma^2}(y_i). Requires t > 0.
PointSet regression_targets(const DenoisingDataset& ds);

struct CellFit {
  Matrix coeffs;             // n x P, row c holds the coefficients of output c
  double lambda = 0.0;       // Tikhonov parameter actually used
  bool constrained = false;  // true when the norm bound was active
  double loss = 0.0;         // mean squared residual per sample
};

/// Relative ridge floor, as a fraction of the mean Gram diagonal.
inline constexpr double kRidgeFloor = 1e-10;

/// argmin_B sum_i ||B phi_i - z_i||^2 subject to ||B||_F <= norm_bound.
/// `features` is m x P and `targets` m x n. The unconstrained problem is
/// solved with a tiny ridge floor; if its solution is infeasible the
/// Tikhonov parameter making ||B(lambda)||_F = norm_bound is found by
/// bisection on the eigen-decomposed normal equations.
CellFit fit_cell(const Matrix& features, const Matrix& targets, double norm_bound);

/// g(y) = B_j phi(y - mu_j) on the Voronoi cell j of y; s(y) = (g(y) - y)/sigma^2.
class PiecewiseScoreModel final : public ScoreModel {
 public:
  PiecewiseScoreModel(WarmStartSet centers, int degree, double sigma_sq, std::vector<Matrix> blocks,
                      double norm_bound, std::size_t basis_cap = kDefaultBasisCap);

  int dimension() const override { return basis_.dimension(); }
  Vector score(PointRef y) const override;

  /// (g(y), s(y)).
  std::pair<Vector, Vector> evaluate(PointRef y) const;
  Vector denoiser(PointRef y) const;

  const WarmStartSet& centers() const { return centers_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const FeatureBasis& basis() const { return basis_; }
  int degree() const { return basis_.degree(); }
  double sigma_sq() const { return basis_.sigma_sq(); }
  double norm_bound() const { return norm_bound_; }

  /// Block predicting the constant `center` (used for empty cells).
  static Matrix constant_block(PointRef center, std::size_t basis_size);

 private:
  WarmStartSet centers_;
  FeatureBasis basis_;
  std::vector<Matrix> blocks_;
  double norm_bound_;
};

struct CellReport {
  std::size_t samples = 0;
  double loss = 0.0;
  double lambda = 0.0;
  bool constrained = false;
};

/// One fit_cell per nonempty Voronoi cell with features centered at the
/// cell's warm start; empty cells get constant_block(center). Requires
/// ds.t > 0 and a basis of matching dimension and sigma^2.
PiecewiseScoreModel fit_piecewise(const DenoisingDataset& ds, const WarmStartSet& centers,
                                  const FeatureBasis& basis, double norm_bound,
                                  std::vector<CellReport>* report = nullptr);

/// (g(y), s(y)) for `model` at y.
std::pair<Vector, Vector> evaluate_model(const PiecewiseScoreModel& model, PointRef y);

}  // namespace gmdiffuse
