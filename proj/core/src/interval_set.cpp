#include "ergo/interval_set.hpp"

#include <algorithm>

#include "ergo/errors.hpp"

namespace ergo {

Interval::Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
  require(lo < hi, "interval must satisfy lo < hi, got [" + formatRational(lo) + ", " + formatRational(hi) + ")");
}

IntervalSet::IntervalSet(Interval iv) { pieces_.push_back(std::move(iv)); }

IntervalSet IntervalSet::fromPieces(std::vector<Interval> pieces) {
  std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet out;
  for (auto& p : pieces) {
    if (!(p.lo < p.hi)) continue;
    if (!out.pieces_.empty() && p.lo <= out.pieces_.back().hi) {
      if (p.hi > out.pieces_.back().hi) out.pieces_.back().hi = std::move(p.hi);
    } else {
      out.pieces_.push_back(std::move(p));
    }
  }
  return out;
}

IntervalSet IntervalSet::fromPieces(std::vector<std::pair<Rational, Rational>> bounds) {
  std::vector<Interval> pieces;
  pieces.reserve(bounds.size());
  for (auto& [lo, hi] : bounds) {
    Interval iv;
    iv.lo = std::move(lo);
    iv.hi = std::move(hi);
    pieces.push_back(std::move(iv));
  }
  return fromPieces(std::move(pieces));
}

IntervalSet IntervalSet::unit() { return IntervalSet(Interval(0, 1)); }

IntervalSet IntervalSet::interval(const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) return {};
  return IntervalSet(Interval(lo, hi));
}

Rational IntervalSet::measure() const {
  Rational m = 0;
  for (const auto& p : pieces_) m += p.hi - p.lo;
  return m;
}

bool IntervalSet::contains(const Rational& x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](const Rational& v, const Interval& iv) { return v < iv.lo; });
  if (it == pieces_.begin()) return false;
  return (it - 1)->contains(x);
}

bool IntervalSet::includes(const IntervalSet& other) const {
  std::size_t j = 0;
  for (const auto& p : other.pieces_) {
    while (j < pieces_.size() && pieces_[j].hi <= p.lo) ++j;
    if (j == pieces_.size()) return false;
    if (pieces_[j].lo > p.lo || pieces_[j].hi < p.hi) return false;
  }
  return true;
}

bool IntervalSet::intersects(const IntervalSet& other) const {
  std::size_t i = 0, j = 0;
  while (i < pieces_.size() && j < other.pieces_.size()) {
    const auto& a = pieces_[i];
    const auto& b = other.pieces_[j];
    if (a.hi <= b.lo) {
      ++i;
    } else if (b.hi <= a.lo) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

bool IntervalSet::withinUnit() const {
  return pieces_.empty() || (pieces_.front().lo >= 0 && pieces_.back().hi <= 1);
}

IntervalSet IntervalSet::translated(const Rational& offset) const {
  IntervalSet out = *this;
  for (auto& p : out.pieces_) {
    p.lo += offset;
    p.hi += offset;
  }
  return out;
}

IntervalSet IntervalSet::prefixOfMeasure(const Rational& m) const {
  require(m >= 0 && m <= measure(), "prefix measure out of range");
  IntervalSet out;
  Rational left = m;
  for (const auto& p : pieces_) {
    if (left <= 0) break;
    const Rational len = p.hi - p.lo;
    if (len <= left) {
      out.pieces_.push_back(p);
      left -= len;
    } else {
      out.pieces_.push_back(Interval(p.lo, p.lo + left));
      left = 0;
    }
  }
  return out;
}

Rational IntervalSet::quantile(const Rational& m) const {
  require(m > 0 && m <= measure(), "quantile measure out of range");
  Rational left = m;
  for (const auto& p : pieces_) {
    const Rational len = p.hi - p.lo;
    if (left <= len) return p.lo + left;
    left -= len;
  }
  return pieces_.back().hi;
}

namespace {

bool keep(bool inA, bool inB, SetOp op) {
  switch (op) {
    case SetOp::Union: return inA || inB;
    case SetOp::Intersect: return inA && inB;
    case SetOp::Difference: return inA && !inB;
    case SetOp::SymmetricDifference: return inA != inB;
  }
  return false;
}

}  // namespace

IntervalSet setAlgebra(const IntervalSet& a, const IntervalSet& b, SetOp op) {
  // Sweep over the merged boundary sequence; inside each elementary segment
  // membership in a and b is constant.
  const auto pa = a.pieces();
  const auto pb = b.pieces();
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  bool inA = false, inB = false;
  // Boundary cursor: each piece contributes lo then hi.
  auto nextA = [&]() -> const Rational* {
    if (i >= 2 * pa.size()) return nullptr;
    return (i % 2 == 0) ? &pa[i / 2].lo : &pa[i / 2].hi;
  };
  auto nextB = [&]() -> const Rational* {
    if (j >= 2 * pb.size()) return nullptr;
    return (j % 2 == 0) ? &pb[j / 2].lo : &pb[j / 2].hi;
  };
  Rational cursor;
  bool started = false;
  while (true) {
    const Rational* ba = nextA();
    const Rational* bb = nextB();
    if (!ba && !bb) break;
    const Rational& x = (!bb || (ba && *ba <= *bb)) ? *ba : *bb;
    if (started && cursor < x && keep(inA, inB, op)) {
      if (!out.empty() && out.back().hi == cursor)
        out.back().hi = x;
      else
        out.push_back(Interval(cursor, x));
    }
    const Rational at = x;  // copy before advancing the cursors
    if (ba && *ba == at) {
      inA = (i % 2 == 0);
      ++i;
    }
    if (bb && *bb == at) {
      inB = (j % 2 == 0);
      ++j;
    }
    cursor = at;
    started = true;
  }
  return IntervalSet::fromPieces(std::move(out));
}

Rational setMeasure(const IntervalSet& s) { return s.measure(); }

Rational intersectionMeasure(const IntervalSet& a, const IntervalSet& b) {
  const auto pa = a.pieces();
  const auto pb = b.pieces();
  Rational total = 0;
  std::size_t i = 0, j = 0;
  while (i < pa.size() && j < pb.size()) {
    const Rational& lo = pa[i].lo > pb[j].lo ? pa[i].lo : pb[j].lo;
    const Rational& hi = pa[i].hi < pb[j].hi ? pa[i].hi : pb[j].hi;
    if (lo < hi) total += hi - lo;
    if (pa[i].hi < pb[j].hi)
      ++i;
    else
      ++j;
  }
  return total;
}

IntervalSet unionAll(std::span<const IntervalSet> sets) {
  std::vector<Interval> all;
  for (const auto& s : sets) all.insert(all.end(), s.pieces().begin(), s.pieces().end());
  return IntervalSet::fromPieces(std::move(all));
}

std::string describe(const IntervalSet& s) {
  if (s.empty()) return "∅";
  std::string out;
  for (const auto& p : s.pieces()) {
    if (!out.empty()) out += " ∪ ";
    out += "[" + p.lo.get_str() + "," + p.hi.get_str() + ")";
  }
  return out;
}

}  // namespace ergo
