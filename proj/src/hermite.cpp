#include "gmdiffuse/hermite.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gmdiffuse {
namespace {

// Compositions of `remaining` into entries[pos..], leading entries largest first.
void compositions(std::vector<int>& entries, std::size_t pos, int remaining,
                  std::vector<MultiIndex>& out) {
  if (pos + 1 == entries.size()) {
    entries[pos] = remaining;
    out.push_back({entries});
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    entries[pos] = v;
    compositions(entries, pos + 1, remaining - v, out);
  }
  entries[pos] = 0;
}

}  // namespace

int MultiIndex::degree() const { return std::accumulate(entries.begin(), entries.end(), 0); }

std::size_t basis_size(int n, int d) {
  // C(n+d, d) = prod_{i=1..d} (n+i)/i, exact at every step.
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t c = 1;
  for (int i = 1; i <= d; ++i) {
    const auto num = static_cast<std::size_t>(n + i);
    if (c > kMax / num) return kMax;
    c = c * num / static_cast<std::size_t>(i);
  }
  return c;
}

std::vector<MultiIndex> enumerate_multi_indices(int n, int d, std::size_t cap) {
  if (n < 1) throw std::invalid_argument("enumerate_multi_indices: n must be >= 1");
  if (d < 0) throw std::invalid_argument("enumerate_multi_indices: d must be >= 0");
  const std::size_t count = basis_size(n, d);
  if (count > cap) {
    throw std::length_error("Hermite basis of size C(" + std::to_string(n + d) + ", " +
                            std::to_string(d) + ") exceeds the cap of " + std::to_string(cap));
  }
  std::vector<MultiIndex> out;
  out.reserve(count);
  std::vector<int> entries(static_cast<std::size_t>(n), 0);
  for (int g = 0; g <= d; ++g) compositions(entries, 0, g, out);
  return out;
}

void hermite_table(int d, double u, std::span<double> out) {
  out[0] = 1.0;
  if (d >= 1) out[1] = u;
  for (int k = 2; k <= d; ++k) out[k] = u * out[k - 1] - (k - 1) * out[k - 2];
}

double hermite_1d(int k, double sigma_sq, double z) {
  if (k < 0) throw std::invalid_argument("hermite_1d: k must be >= 0");
  const double u = z / std::sqrt(sigma_sq);
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = u;
  for (int j = 2; j <= k; ++j) {
    const double next = u * cur - (j - 1) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

FeatureBasis::FeatureBasis(int n, int d, double sigma_sq, bool normalized, std::size_t cap)
    : n_(n),
      d_(d),
      sigma_sq_(sigma_sq),
      sigma_(std::sqrt(sigma_sq)),
      normalized_(normalized),
      indices_(enumerate_multi_indices(n, d, cap)) {
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("FeatureBasis: sigma_sq must be positive");
  scale_.reserve(indices_.size());
  for (const auto& k : indices_) {
    double log_fact = 0.0;
    for (int e : k.entries) log_fact += std::lgamma(e + 1.0);
    scale_.push_back(normalized ? std::exp(-0.5 * log_fact) : 1.0);
  }
}

void FeatureBasis::evaluate(PointRef y, PointRef center, std::span<double> out,
                            std::span<double> scratch) const {
  const auto stride = static_cast<std::size_t>(d_ + 1);
  for (int i = 0; i < n_; ++i) {
    hermite_table(d_, (y[i] - center[i]) / sigma_, scratch.subspan(i * stride, stride));
  }
  for (std::size_t f = 0; f < indices_.size(); ++f) {
    const auto& e = indices_[f].entries;
    double v = scale_[f];
    for (int i = 0; i < n_; ++i) {
      if (e[i] != 0) v *= scratch[i * stride + static_cast<std::size_t>(e[i])];
    }
    out[f] = v;
  }
}

Vector FeatureBasis::feature_vector(PointRef y, PointRef center) const {
  Vector out(static_cast<Eigen::Index>(size()));
  std::vector<double> scratch(static_cast<std::size_t>(n_ * (d_ + 1)));
  evaluate(y, center, std::span<double>(out.data(), size()), scratch);
  return out;
}

}  // namespace gmdiffuse
