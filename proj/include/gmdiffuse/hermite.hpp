#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gmdiffuse/types.hpp"

namespace gmdiffuse {

inline constexpr std::size_t kDefaultBasisCap = 200000;

struct MultiIndex {
  std::vector<int> entries;

  int degree() const;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// C(n + d, d), saturating at SIZE_MAX.
std::size_t basis_size(int n, int d);

/// All multi-indices of length n with total degree <= d, graded by degree;
/// within a degree, larger leading entries come first:
/// (n=2, d=2) -> (0,0) (1,0) (0,1) (2,0) (1,1) (0,2).
/// Throws std::length_error if C(n+d, d) exceeds `cap`.
std::vector<MultiIndex> enumerate_multi_indices(int n, int d, std::size_t cap = kDefaultBasisCap);

/// Probabilists' Hermite polynomial He_k evaluated at z / sigma.
double hermite_1d(int k, double sigma_sq, double z);

/// He_0(u), ..., He_d(u) via the three-term recurrence.
void hermite_table(int d, double u, std::span<double> out);

/// Tensor Hermite features h_k(y - center) for |k| <= d under the reference
/// Gaussian N(0, sigma_sq I). With `normalized`, each feature is divided by
/// sqrt(k!) so the basis is orthonormal in L^2(N(0, sigma_sq I)).
class FeatureBasis {
 public:
  FeatureBasis(int n, int d, double sigma_sq, bool normalized = true,
               std::size_t cap = kDefaultBasisCap);

  int dimension() const { return n_; }
  int degree() const { return d_; }
  double sigma_sq() const { return sigma_sq_; }
  bool normalized() const { return normalized_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  /// Writes size() features into `out`. `scratch` must hold n*(d+1) doubles.
  void evaluate(PointRef y, PointRef center, std::span<double> out,
                std::span<double> scratch) const;

  Vector feature_vector(PointRef y, PointRef center) const;

 private:
  int n_;
  int d_;
  double sigma_sq_;
  double sigma_;
  bool normalized_;
  std::vector<MultiIndex> indices_;
  std::vector<double> scale_;  // 1/sqrt(k!) or 1
};

}  // namespace gmdiffuse
