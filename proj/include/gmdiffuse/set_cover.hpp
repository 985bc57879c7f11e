#pragma once

#include <cstddef>
#include <vector>

#include "gmdiffuse/types.hpp"

namespace gmdiffuse {

struct CoverResult {
  std::vector<std::size_t> selected;  // candidate indices, in selection order
  std::size_t uncovered = 0;          // |U| when the rounds ran out
};

/// Greedy set cover over closed balls B_c(radius) around the candidates
/// themselves. Each round picks the uncovered candidate whose ball contains
/// the most uncovered candidates (lowest index on ties) and removes that
/// ball from U. Stops after `max_rounds` or when U is empty.
CoverResult greedy_cover(const PointSet& candidates, double radius, std::size_t max_rounds);

/// Same selection rule on an explicit incidence structure: `sets[j]` lists
/// the elements (indices < universe) covered by set j.
CoverResult greedy_cover_sets(const std::vector<std::vector<std::size_t>>& sets,
                              std::size_t universe, std::size_t max_rounds);

}  // namespace gmdiffuse
