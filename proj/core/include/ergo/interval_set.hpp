#pragma once

#include <span>
#include <string>
#include <vector>

#include "ergo/rational.hpp"

namespace ergo {

/// Half-open interval [lo, hi) with lo < hi.
struct Interval {
  Rational lo;
  Rational hi;

  Interval() = default;
  Interval(Rational l, Rational h);

  Rational length() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x < hi; }

  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
};

/// A finite disjoint union of half-open intervals, kept canonical: sorted,
/// pairwise disjoint, and with touching neighbours merged.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(Interval iv);
  /// Canonicalizes arbitrary (possibly overlapping, unsorted, empty) pieces.
  static IntervalSet fromPieces(std::vector<Interval> pieces);
  static IntervalSet fromPieces(std::vector<std::pair<Rational, Rational>> bounds);
  static IntervalSet unit();
  static IntervalSet interval(const Rational& lo, const Rational& hi);

  std::span<const Interval> pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }
  Rational measure() const;

  bool contains(const Rational& x) const;
  bool includes(const IntervalSet& other) const;  // other ⊆ *this
  bool intersects(const IntervalSet& other) const;
  bool withinUnit() const;

  IntervalSet translated(const Rational& offset) const;
  /// Leftmost part of the set with the given measure (0 <= m <= measure()).
  IntervalSet prefixOfMeasure(const Rational& m) const;
  /// Point x such that measure(*this ∩ [.., x)) == m, for 0 < m <= measure().
  Rational quantile(const Rational& m) const;

  friend bool operator==(const IntervalSet& a, const IntervalSet& b) { return a.pieces_ == b.pieces_; }

 private:
  std::vector<Interval> pieces_;
};

enum class SetOp { Union, Intersect, Difference, SymmetricDifference };

IntervalSet setAlgebra(const IntervalSet& a, const IntervalSet& b, SetOp op);
Rational setMeasure(const IntervalSet& s);

inline IntervalSet operator|(const IntervalSet& a, const IntervalSet& b) { return setAlgebra(a, b, SetOp::Union); }
inline IntervalSet operator&(const IntervalSet& a, const IntervalSet& b) { return setAlgebra(a, b, SetOp::Intersect); }
inline IntervalSet operator-(const IntervalSet& a, const IntervalSet& b) { return setAlgebra(a, b, SetOp::Difference); }
inline IntervalSet operator^(const IntervalSet& a, const IntervalSet& b) {
  return setAlgebra(a, b, SetOp::SymmetricDifference);
}

/// μ(a ∩ b) without materializing the intersection.
Rational intersectionMeasure(const IntervalSet& a, const IntervalSet& b);

/// Union of many sets (linear merge after one sort).
IntervalSet unionAll(std::span<const IntervalSet> sets);

/// Human readable `[lo,hi) ∪ ...` form, for messages and tests.
std::string describe(const IntervalSet& s);

}  // namespace ergo
