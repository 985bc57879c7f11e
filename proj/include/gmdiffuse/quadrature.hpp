#pragma once

#include <vector>

namespace gmdiffuse {

/// Gauss-Hermite rule for the standard normal measure: sum_i w_i f(x_i)
/// approximates E f(Z), Z ~ N(0, 1), exactly for polynomials of degree
/// <= 2 * nodes - 1. Weights sum to one.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int nodes);

}  // namespace gmdiffuse
