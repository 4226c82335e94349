#pragma once

#include <vector>

#include "ergo/interval_set.hpp"

namespace ergo {

/// Rokhlin tower: level i is the image of the base under i steps.
struct Tower {
  IntervalSet base;
  long long height = 0;
  std::vector<IntervalSet> levels;

  Rational coverage() const { return base.measure() * fromInt(height); }
  IntervalSet support() const { return unionAll(levels); }
  /// Exact pairwise disjointness of the levels.
  bool levelsDisjoint() const;
};

}  // namespace ergo
