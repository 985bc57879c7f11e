#include "gmdiffuse/kernels.hpp"

namespace gmdiffuse {

PointSet score_batch(const ScoreModel& model, const PointSet& ys, Exec exec) {
  PointSet out(ys.rows(), ys.cols());
  for_each_index(static_cast<std::size_t>(ys.rows()), exec, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    Vector s = model.score(point(ys, r));
    if (s.size() != ys.cols()) throw std::runtime_error("score has wrong dimension");
    if (!s.allFinite()) throw std::runtime_error("score is not finite");
    out.row(r) = s.transpose();
  });
  return out;
}

std::size_t nearest_center(const PointSet& centers, PointRef y) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < centers.rows(); ++j) {
    const double d2 = (point(centers, j) - y).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<std::size_t>(j);
    }
  }
  return best;
}

std::vector<std::size_t> assign_cells(const PointSet& centers, const PointSet& ys, Exec exec) {
  if (centers.rows() == 0) throw std::invalid_argument("assign_cells: no centers");
  std::vector<std::size_t> cell(static_cast<std::size_t>(ys.rows()));
  for_each_index(cell.size(), exec, [&](std::size_t i) {
    cell[i] = nearest_center(centers, point(ys, static_cast<Eigen::Index>(i)));
  });
  return cell;
}

Matrix feature_matrix(const FeatureBasis& basis, const PointSet& ys,
                      std::span<const std::size_t> rows, PointRef center, Exec exec) {
  const auto p = basis.size();
  // Row-major so each sample's features are written contiguously.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> phi(
      static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
  const auto scratch_len = static_cast<std::size_t>(basis.dimension() * (basis.degree() + 1));
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<double> scratch(scratch_len);
#pragma omp for schedule(static)
      for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows.size()); ++r) {
        basis.evaluate(point(ys, static_cast<Eigen::Index>(rows[r])), center,
                       std::span<double>(phi.row(r).data(), p), scratch);
      }
    }
  } else {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      phi.row(static_cast<Eigen::Index>(r)) =
          basis.feature_vector(point(ys, static_cast<Eigen::Index>(rows[r])), center).transpose();
    }
  }
  return phi;
}

NormalEquations normal_equations(const Matrix& features, const Matrix& targets) {
  if (features.rows() != targets.rows()) {
    throw std::invalid_argument("normal_equations: features and targets differ in row count");
  }
  NormalEquations eq;
  eq.gram = Matrix::Zero(features.cols(), features.cols());
  eq.gram.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose());
  eq.gram.triangularView<Eigen::StrictlyUpper>() = eq.gram.transpose();
  eq.rhs = features.transpose() * targets;
  return eq;
}

NormalEquations normal_equations_serial(const FeatureBasis& basis, const PointSet& ys,
                                        const PointSet& targets,
                                        std::span<const std::size_t> rows, PointRef center) {
  const auto p = static_cast<Eigen::Index>(basis.size());
  NormalEquations eq{Matrix::Zero(p, p), Matrix::Zero(p, targets.cols())};
  for (auto r : rows) {
    const Vector phi = basis.feature_vector(point(ys, static_cast<Eigen::Index>(r)), center);
    eq.gram.noalias() += phi * phi.transpose();
    eq.rhs.noalias() += phi * targets.row(static_cast<Eigen::Index>(r));
  }
  return eq;
}

}  // namespace gmdiffuse
