#include "gmdiffuse/score_regression.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gmdiffuse/kernels.hpp"
#include "gmdiffuse/rng.hpp"

namespace gmdiffuse {

PointSet add_gaussian_noise(const PointSet& xs, double t, std::uint64_t seed) {
  if (!(t >= 0.0)) throw std::invalid_argument("add_gaussian_noise: t must be nonnegative");
  PointSet ys = xs;
  if (t == 0.0) return ys;
  const double scale = std::sqrt(t);
  const auto m = static_cast<std::size_t>(xs.rows());
  const auto chunks = static_cast<std::ptrdiff_t>((m + kStreamChunk - 1) / kStreamChunk);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t chunk = 0; chunk < chunks; ++chunk) {
    auto gen = make_stream(seed, static_cast<std::uint64_t>(chunk));
    std::normal_distribution<double> normal;
    const std::size_t begin = static_cast<std::size_t>(chunk) * kStreamChunk;
    const std::size_t end = std::min(m, begin + kStreamChunk);
    for (std::size_t i = begin; i < end; ++i) {
      for (Eigen::Index c = 0; c < xs.cols(); ++c) {
        ys(static_cast<Eigen::Index>(i), c) += scale * normal(gen);
      }
    }
  }
  return ys;
}

DenoisingDataset build_denoising_dataset(const PointSet& samples, double t, double sigma0_sq,
                                         const WarmStartSet& centers, std::uint64_t seed) {
  DenoisingDataset ds;
  ds.ys = add_gaussian_noise(samples, t, seed);
  ds.xs = samples;
  ds.t = t;
  ds.sigma_sq = t + sigma0_sq;
  ds.cell_of = assign_cells(centers.centers, ds.ys);
  return ds;
}

PointSet regression_targets(const DenoisingDataset& ds) {
  if (!(ds.t > 0.0)) throw std::invalid_argument("regression_targets: t must be positive");
  const double r = ds.sigma_sq / ds.t;
  PointSet z = (1.0 - r) * ds.ys + r * ds.xs;
  return z;
}

CellFit fit_cell(const Matrix& features, const Matrix& targets, double norm_bound) {
  if (features.rows() == 0 || features.cols() == 0) {
    throw std::invalid_argument("fit_cell: empty feature matrix");
  }
  if (features.rows() != targets.rows()) {
    throw std::invalid_argument("fit_cell: features and targets differ in row count");
  }
  if (!(norm_bound > 0.0)) throw std::invalid_argument("fit_cell: norm bound must be positive");

  const NormalEquations eq = normal_equations(features, targets);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(eq.gram);
  if (eig.info() != Eigen::Success) throw std::runtime_error("fit_cell: eigensolver failed");
  const Matrix& V = eig.eigenvectors();
  const Vector lam = eig.eigenvalues().cwiseMax(0.0);
  const Matrix C = V.transpose() * eq.rhs;  // P x n
  const Vector c_sq = C.rowwise().squaredNorm();

  auto norm_at = [&](double l) {
    return std::sqrt((c_sq.array() / (lam.array() + l).square()).sum());
  };
  auto solve_at = [&](double l) -> Matrix {
    const Vector inv = (lam.array() + l).inverse();
    return (V * inv.asDiagonal() * C).transpose();
  };

  const double floor = kRidgeFloor * eq.gram.diagonal().mean();
  CellFit fit;
  if (norm_at(floor) <= norm_bound) {
    fit.lambda = floor;
    fit.coeffs = solve_at(floor);
  } else {
    // ||B(lambda)|| is decreasing; ||B(hi)|| <= ||C|| / hi = norm_bound.
    double lo = floor;
    double hi = std::max(floor, std::sqrt(c_sq.sum()) / norm_bound);
    for (int it = 0; it < 400 && hi > lo * (1.0 + 1e-15); ++it) {
      const double mid = std::sqrt(lo * hi);
      if (norm_at(mid) > norm_bound) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    fit.lambda = hi;
    fit.constrained = true;
    fit.coeffs = solve_at(hi);
    // Guard against the last ulp of the eigen path.
    const double nrm = fit.coeffs.norm();
    if (nrm > norm_bound) fit.coeffs *= norm_bound / nrm;
  }
  fit.loss = (features * fit.coeffs.transpose() - targets).squaredNorm() /
             static_cast<double>(features.rows());
  return fit;
}

PiecewiseScoreModel::PiecewiseScoreModel(WarmStartSet centers, int degree, double sigma_sq,
                                         std::vector<Matrix> blocks, double norm_bound,
                                         std::size_t basis_cap)
    : centers_(std::move(centers)),
      basis_(static_cast<int>(centers_.centers.cols()), degree, sigma_sq, true, basis_cap),
      blocks_(std::move(blocks)),
      norm_bound_(norm_bound) {
  centers_.validate();
  if (blocks_.size() != centers_.size()) {
    throw std::invalid_argument("PiecewiseScoreModel: one block per center required");
  }
  for (const auto& b : blocks_) {
    if (b.rows() != basis_.dimension() || b.cols() != static_cast<Eigen::Index>(basis_.size())) {
      throw std::invalid_argument("PiecewiseScoreModel: block has wrong shape");
    }
  }
}

Matrix PiecewiseScoreModel::constant_block(PointRef center, std::size_t basis_size) {
  Matrix b = Matrix::Zero(center.size(), static_cast<Eigen::Index>(basis_size));
  b.col(0) = center;
  return b;
}

Vector PiecewiseScoreModel::denoiser(PointRef y) const {
  const std::size_t j = nearest_center(centers_.centers, y);
  const auto p = basis_.size();
  Vector phi(static_cast<Eigen::Index>(p));
  thread_local std::vector<double> scratch;
  scratch.resize(static_cast<std::size_t>(basis_.dimension() * (basis_.degree() + 1)));
  basis_.evaluate(y, point(centers_.centers, static_cast<Eigen::Index>(j)),
                  std::span<double>(phi.data(), p), scratch);
  return blocks_[j] * phi;
}

std::pair<Vector, Vector> PiecewiseScoreModel::evaluate(PointRef y) const {
  Vector g = denoiser(y);
  Vector s = (g - y) / basis_.sigma_sq();
  return {std::move(g), std::move(s)};
}

Vector PiecewiseScoreModel::score(PointRef y) const {
  return (denoiser(y) - y) / basis_.sigma_sq();
}

PiecewiseScoreModel fit_piecewise(const DenoisingDataset& ds, const WarmStartSet& centers,
                                  const FeatureBasis& basis, double norm_bound,
                                  std::vector<CellReport>* report) {
  if (!(ds.t > 0.0)) throw std::invalid_argument("fit_piecewise: t must be positive");
  if (std::abs(basis.sigma_sq() - ds.sigma_sq) > 1e-12 * ds.sigma_sq) {
    throw std::invalid_argument("fit_piecewise: basis variance differs from dataset sigma^2");
  }
  if (ds.cell_of.size() != static_cast<std::size_t>(ds.ys.rows())) {
    throw std::invalid_argument("fit_piecewise: dataset cell assignment is incomplete");
  }
  const PointSet targets = regression_targets(ds);
  const std::size_t k = centers.size();
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < ds.cell_of.size(); ++i) members.at(ds.cell_of[i]).push_back(i);

  std::vector<Matrix> blocks(k);
  if (report) report->assign(k, CellReport{});
  for (std::size_t j = 0; j < k; ++j) {
    const auto center = point(centers.centers, static_cast<Eigen::Index>(j));
    if (members[j].empty()) {
      blocks[j] = PiecewiseScoreModel::constant_block(center, basis.size());
      continue;
    }
    const Matrix phi = feature_matrix(basis, ds.ys, members[j], center);
    Matrix z(static_cast<Eigen::Index>(members[j].size()), targets.cols());
    for (std::size_t r = 0; r < members[j].size(); ++r) {
      z.row(static_cast<Eigen::Index>(r)) = targets.row(static_cast<Eigen::Index>(members[j][r]));
    }
    CellFit fit = fit_cell(phi, z, norm_bound);
    if (report) {
      (*report)[j] = CellReport{members[j].size(), fit.loss, fit.lambda, fit.constrained};
    }
    blocks[j] = std::move(fit.coeffs);
  }
  return PiecewiseScoreModel(centers, basis.degree(), basis.sigma_sq(), std::move(blocks),
                             norm_bound);
}

std::pair<Vector, Vector> evaluate_model(const PiecewiseScoreModel& model, PointRef y) {
  return model.evaluate(y);
}

}  // namespace gmdiffuse
