#include "gmdiffuse/set_cover.hpp"

#include <stdexcept>

namespace gmdiffuse {

CoverResult greedy_cover(const PointSet& candidates, double radius, std::size_t max_rounds) {
  if (!(radius > 0.0)) throw std::invalid_argument("greedy_cover: radius must be positive");
  const auto m = static_cast<std::size_t>(candidates.rows());
  const double r2 = radius * radius;

  std::vector<char> uncovered(m, 1);
  std::size_t remaining = m;
  CoverResult result;

  std::vector<std::size_t> counts(m);
  for (std::size_t round = 0; round < max_rounds && remaining > 0; ++round) {
    const auto mi = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t a = 0; a < mi; ++a) {
      std::size_t c = 0;
      if (uncovered[a]) {
        for (std::size_t b = 0; b < m; ++b) {
          if (uncovered[b] && (candidates.row(a) - candidates.row(b)).squaredNorm() <= r2) ++c;
        }
      }
      counts[a] = c;
    }
    std::size_t best = m;
    for (std::size_t a = 0; a < m; ++a) {
      if (uncovered[a] && (best == m || counts[a] > counts[best])) best = a;
    }
    result.selected.push_back(best);
    for (std::size_t b = 0; b < m; ++b) {
      if (uncovered[b] && (candidates.row(best) - candidates.row(b)).squaredNorm() <= r2) {
        uncovered[b] = 0;
        --remaining;
      }
    }
  }
  result.uncovered = remaining;
  return result;
}

CoverResult greedy_cover_sets(const std::vector<std::vector<std::size_t>>& sets,
                              std::size_t universe, std::size_t max_rounds) {
  std::vector<char> uncovered(universe, 1);
  std::size_t remaining = universe;
  CoverResult result;
  for (std::size_t round = 0; round < max_rounds && remaining > 0; ++round) {
    std::size_t best = sets.size();
    std::size_t best_gain = 0;
    for (std::size_t j = 0; j < sets.size(); ++j) {
      std::size_t gain = 0;
      for (auto e : sets[j]) gain += uncovered.at(e);
      if (gain > best_gain) {
        best = j;
        best_gain = gain;
      }
    }
    if (best == sets.size()) break;  // nothing left that any set can cover
    result.selected.push_back(best);
    for (auto e : sets[best]) {
      if (uncovered[e]) {
        uncovered[e] = 0;
        --remaining;
      }
    }
  }
  result.uncovered = remaining;
  return result;
}

}  // namespace gmdiffuse
