#pragma once

#include <Eigen/Dense>

namespace gmdiffuse {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A set of points in R^n, one point per row. Rows are contiguous so a
/// point can be handed to routines taking `PointRef` without a copy.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PointRef = Eigen::Ref<const Eigen::VectorXd>;

inline auto point(const PointSet& set, Eigen::Index i) { return set.row(i).transpose(); }

}  // namespace gmdiffuse
