#include "ergo/towers.hpp"

#include <algorithm>

#include "ergo/errors.hpp"

namespace ergo {

Tower extractTower(const StagedTransformation& t, long long height, const Rational& minCoverage) {
  require(height >= 1, "tower height must be at least 1");
  const long long H = t.height();
  if (height > H)
    fail(ErrorKind::StageExhausted, "CoverageUnattainable",
         "requested height " + std::to_string(height) + " exceeds the column height " + std::to_string(H));
  const long long blocks = H / height;
  Tower tower;
  tower.height = height;
  std::vector<Interval> base;
  for (long long b = 0; b < blocks; ++b) base.emplace_back(t.levelLo[b * height], t.levelLo[b * height] + t.width);
  tower.base = IntervalSet::fromPieces(std::move(base));
  tower.levels.reserve(static_cast<std::size_t>(height));
  for (long long i = 0; i < height; ++i) {
    std::vector<Interval> lvl;
    for (long long b = 0; b < blocks; ++b) {
      const auto& lo = t.levelLo[static_cast<std::size_t>(b * height + i)];
      lvl.emplace_back(lo, lo + t.width);
    }
    tower.levels.push_back(IntervalSet::fromPieces(std::move(lvl)));
  }
  if (!(tower.coverage() > minCoverage))
    fail(ErrorKind::StageExhausted, "CoverageUnattainable",
         "coverage " + formatRational(tower.coverage()) + " is not above " + formatRational(minCoverage));
  return tower;
}

Tower greedyTower(const PiecewiseTranslation& map, const IntervalSet& candidate, long long height,
                  const Rational& minCoverage) {
  require(height >= 1, "tower height must be at least 1");
  IntervalSet base = candidate & iterate(map, height - 1).domain();
  for (long long k = 1; k < height && !base.empty(); ++k) base = base - iterate(map, k).imagePartial(base).image;
  Tower tower;
  tower.height = height;
  tower.base = base;
  IntervalSet cur = base;
  for (long long i = 0; i < height; ++i) {
    tower.levels.push_back(cur);
    if (i + 1 < height) cur = map.image(cur);
  }
  if (!(tower.coverage() > minCoverage))
    fail(ErrorKind::StageExhausted, "CoverageUnattainable",
         "greedy coverage " + formatRational(tower.coverage()) + " is not above " + formatRational(minCoverage));
  return tower;
}

IntervalSet sweepSet(const Tower& tower, const PiecewiseTranslation& map, const IntervalSet& I,
                     const IntervalSet& avoid) {
  require(tower.base.includes(I), "sweep source must lie in the tower base");
  std::vector<IntervalSet> parts;
  IntervalSet cur = I;
  for (long long i = 0; i < tower.height; ++i) {
    parts.push_back(cur - avoid);
    if (i + 1 < tower.height) cur = map.image(cur);
  }
  return unionAll(parts);
}

IntervalSet selectBaseSubset(const Tower& tower, const PiecewiseTranslation& map, const IntervalSet& avoid,
                             const Rational& target) {
  require(target >= 0, "target sweep measure must be non-negative");
  if (target == 0) return {};
  // Events in base coordinates: +1/-1 where the i-th image leaves/enters avoid.
  std::vector<std::pair<Rational, int>> events;
  PiecewiseTranslation li = PiecewiseTranslation::identity(tower.base);
  for (long long i = 0; i < tower.height; ++i) {
    const IntervalSet good = li.preimage(tower.levels[static_cast<std::size_t>(i)] - avoid);
    for (const auto& iv : good.pieces()) {
      events.emplace_back(iv.lo, +1);
      events.emplace_back(iv.hi, -1);
    }
    if (i + 1 < tower.height) li = compose(map, li);
  }
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  // f(x) = sum over i of measure(good_i ∩ [0, x)), piecewise linear in x.
  Rational acc = 0;
  long long slope = 0;
  Rational x = events.empty() ? Rational(0) : events.front().first;
  for (std::size_t e = 0; e < events.size();) {
    const Rational& nx = events[e].first;
    const Rational gain = (nx - x) * fromInt(slope);
    if (slope > 0 && acc + gain >= target) {
      const Rational end = x + (target - acc) / fromInt(slope);
      return tower.base & IntervalSet::interval(0, end);
    }
    acc += gain;
    x = nx;
    while (e < events.size() && events[e].first == x) slope += events[e++].second;
  }
  fail(ErrorKind::Precondition, "TargetTooLarge",
       "target " + formatRational(target) + " exceeds the full sweep measure " + formatRational(acc));
}

}  // namespace ergo
