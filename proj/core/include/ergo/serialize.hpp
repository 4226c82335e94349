#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "ergo/interval_set.hpp"
#include "ergo/piecewise.hpp"

namespace ergo {

// Line format: a count line, then one piece per line.
//   set:         "lo hi"
//   translation: "lo hi offset"
// Every number is written as p/q.

void writeSet(std::ostream& out, const IntervalSet& s);
void writeTranslation(std::ostream& out, const PiecewiseTranslation& t);
IntervalSet readSet(std::istream& in);
PiecewiseTranslation readTranslation(std::istream& in);

std::string toText(const IntervalSet& s);
std::string toText(const PiecewiseTranslation& t);

/// Compact set literal: "lo:hi" intervals separated by commas,
/// e.g. "0/1:1/2" or "0:1/8,1/2:5/8".
IntervalSet parseSetSpec(std::string_view spec);
std::string formatSetSpec(const IntervalSet& s);

}  // namespace ergo
