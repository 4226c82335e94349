#include "ergo/tower.hpp"

#include <algorithm>

namespace ergo {

bool Tower::levelsDisjoint() const {
  std::vector<Interval> all;
  for (const auto& l : levels) all.insert(all.end(), l.pieces().begin(), l.pieces().end());
  std::sort(all.begin(), all.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < all.size(); ++i)
    if (all[i - 1].hi > all[i].lo) return false;
  return true;
}

}  // namespace ergo
