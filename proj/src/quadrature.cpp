#include "gmdiffuse/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace gmdiffuse {
namespace {

// Orthonormal He_k(x)/sqrt(k!) for k < m; returns sum of squares and the
// values at degrees m-1 and m.
struct Orthonormal {
  double sum_sq;
  double top_minus_one;
  double top;
};

Orthonormal orthonormal_values(int m, double x) {
  double prev = 0.0;
  double cur = 1.0;
  double sum_sq = 0.0;
  for (int k = 0; k < m; ++k) {
    sum_sq += cur * cur;
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  return {sum_sq, prev, cur};
}

}  // namespace

GaussHermiteRule gauss_hermite(int nodes) {
  if (nodes < 1) throw std::invalid_argument("gauss_hermite: need at least one node");
  // Golub-Welsch: eigenvalues of the Jacobi matrix of the He recurrence.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(nodes);
  Eigen::VectorXd sub(std::max(nodes - 1, 0));
  for (int k = 1; k < nodes; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigensolver failed");

  GaussHermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(nodes));
  rule.weights.resize(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    double x = solver.eigenvalues()[i];
    // Newton polish on the orthonormal polynomial of degree `nodes`.
    for (int it = 0; it < 3; ++it) {
      const auto v = orthonormal_values(nodes, x);
      const double deriv = std::sqrt(static_cast<double>(nodes)) * v.top_minus_one;
      if (deriv == 0.0) break;
      x -= v.top / deriv;
    }
    // Christoffel weights are accurate even where eigenvectors underflow.
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / orthonormal_values(nodes, x).sum_sq;
  }
  // Symmetrize: the rule is exactly symmetric about zero.
  for (int i = 0, j = nodes - 1; i < j; ++i, --j) {
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (nodes % 2 == 1) rule.nodes[nodes / 2] = 0.0;
  return rule;
}

}  // namespace gmdiffuse
