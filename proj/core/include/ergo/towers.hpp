#pragma once

#include "ergo/builders.hpp"
#include "ergo/tower.hpp"

namespace ergo {

/// Tower of the given height carved from the native column: the base is the
/// union of column levels 0, height, 2·height, ... Raises CoverageUnattainable
/// when the column is too short or the coverage is not above minCoverage.
Tower extractTower(const StagedTransformation& t, long long height, const Rational& minCoverage);

/// Tower for an arbitrary map by greedy base refinement: points of the
/// candidate whose k-th image returns to the base are dropped, k = 1..height-1.
Tower greedyTower(const PiecewiseTranslation& map, const IntervalSet& candidate, long long height,
                  const Rational& minCoverage);

/// {T^i x : x in I, 0 <= i < height, T^i x not in avoid}.
IntervalSet sweepSet(const Tower& tower, const PiecewiseTranslation& map, const IntervalSet& I,
                     const IntervalSet& avoid);

/// Left-anchored prefix I of the base whose sweep (avoiding `avoid`) has
/// measure exactly target. Raises TargetTooLarge.
IntervalSet selectBaseSubset(const Tower& tower, const PiecewiseTranslation& map, const IntervalSet& avoid,
                             const Rational& target);

}  // namespace ergo
