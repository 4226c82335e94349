#include "ergo/piecewise.hpp"

#include <algorithm>

#include "ergo/errors.hpp"

namespace ergo {
namespace {

template <typename Piece>
void sortBySource(std::vector<Piece>& pieces) {
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.source.lo < b.source.lo; });
}

template <typename Piece>
void checkDisjointSources(const std::vector<Piece>& pieces) {
  for (std::size_t i = 1; i < pieces.size(); ++i)
    require(pieces[i - 1].source.hi <= pieces[i].source.lo, "piece sources overlap");
}

template <typename Piece>
void checkDisjointImages(const std::vector<Piece>& pieces) {
  std::vector<Interval> images;
  images.reserve(pieces.size());
  for (const auto& p : pieces) images.push_back(p.image());
  std::sort(images.begin(), images.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < images.size(); ++i)
    require(images[i - 1].hi <= images[i].lo, "piece images overlap");
}

// Index of the first piece whose source ends after x.
template <typename Piece>
std::size_t firstEndingAfter(const std::vector<Piece>& pieces, const Rational& x) {
  auto it = std::upper_bound(pieces.begin(), pieces.end(), x,
                             [](const Rational& v, const Piece& p) { return v < p.source.hi; });
  return static_cast<std::size_t>(it - pieces.begin());
}

void mergeTranslations(std::vector<TranslationPiece>& pieces) {
  std::vector<TranslationPiece> out;
  out.reserve(pieces.size());
  for (auto& p : pieces) {
    if (!out.empty() && out.back().source.hi == p.source.lo && out.back().offset == p.offset)
      out.back().source.hi = std::move(p.source.hi);
    else
      out.push_back(std::move(p));
  }
  pieces = std::move(out);
}

void mergeAffine(std::vector<AffinePiece>& pieces) {
  std::vector<AffinePiece> out;
  out.reserve(pieces.size());
  for (auto& p : pieces) {
    if (!out.empty() && out.back().source.hi == p.source.lo && out.back().offset == p.offset &&
        out.back().scale == p.scale)
      out.back().source.hi = std::move(p.source.hi);
    else
      out.push_back(std::move(p));
  }
  pieces = std::move(out);
}

// Walks the intervals of s against sorted pieces, calling onHit(piece, lo, hi)
// for covered segments and collecting uncovered segments.
template <typename Piece, typename OnHit>
IntervalSet sweep(const std::vector<Piece>& pieces, const IntervalSet& s, OnHit&& onHit) {
  std::vector<Interval> gaps;
  std::size_t k = 0;
  for (const auto& iv : s.pieces()) {
    while (k < pieces.size() && pieces[k].source.hi <= iv.lo) ++k;
    Rational x = iv.lo;
    std::size_t j = k;
    while (x < iv.hi) {
      while (j < pieces.size() && pieces[j].source.hi <= x) ++j;
      if (j < pieces.size() && pieces[j].source.lo <= x) {
        const Rational& end = pieces[j].source.hi < iv.hi ? pieces[j].source.hi : iv.hi;
        onHit(pieces[j], x, end);
        x = end;
      } else {
        Rational end = (j < pieces.size() && pieces[j].source.lo < iv.hi) ? pieces[j].source.lo : iv.hi;
        gaps.push_back(Interval(x, end));
        x = std::move(end);
      }
    }
    k = j;
  }
  return IntervalSet::fromPieces(std::move(gaps));
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseTranslation

PiecewiseTranslation PiecewiseTranslation::fromPieces(std::vector<TranslationPiece> pieces, bool requireUnit) {
  sortBySource(pieces);
  checkDisjointSources(pieces);
  checkDisjointImages(pieces);
  if (requireUnit) {
    for (const auto& p : pieces) {
      require(p.source.lo >= 0 && p.source.hi <= 1, "piece source outside [0,1)");
      require(p.source.lo + p.offset >= 0 && p.source.hi + p.offset <= 1, "piece image outside [0,1)");
    }
  }
  mergeTranslations(pieces);
  PiecewiseTranslation t;
  t.pieces_ = std::move(pieces);
  return t;
}

PiecewiseTranslation PiecewiseTranslation::identity(const IntervalSet& on) {
  PiecewiseTranslation t;
  for (const auto& iv : on.pieces()) t.pieces_.push_back({iv, Rational(0)});
  return t;
}

IntervalSet PiecewiseTranslation::domain() const {
  std::vector<Interval> out;
  out.reserve(pieces_.size());
  for (const auto& p : pieces_) out.push_back(p.source);
  return IntervalSet::fromPieces(std::move(out));
}

IntervalSet PiecewiseTranslation::range() const {
  std::vector<Interval> out;
  out.reserve(pieces_.size());
  for (const auto& p : pieces_) out.push_back(p.image());
  return IntervalSet::fromPieces(std::move(out));
}

IntervalSet PiecewiseTranslation::undefinedResidual() const { return IntervalSet::unit() - domain(); }

std::optional<Rational> PiecewiseTranslation::apply(const Rational& x) const {
  const std::size_t k = firstEndingAfter(pieces_, x);
  if (k < pieces_.size() && pieces_[k].source.lo <= x) return x + pieces_[k].offset;
  return std::nullopt;
}

PartialImage PiecewiseTranslation::imagePartial(const IntervalSet& s) const {
  std::vector<Interval> images;
  IntervalSet blocked = sweep(pieces_, s, [&](const TranslationPiece& p, const Rational& lo, const Rational& hi) {
    images.push_back(Interval(lo + p.offset, hi + p.offset));
  });
  return {IntervalSet::fromPieces(std::move(images)), std::move(blocked)};
}

IntervalSet PiecewiseTranslation::image(const IntervalSet& s) const {
  auto r = imagePartial(s);
  if (!r.blocked.empty())
    throw PartiallyUndefinedError("set meets the undefined residual (" + describe(r.blocked) + ")",
                                  r.blocked.measure());
  return std::move(r.image);
}

IntervalSet PiecewiseTranslation::preimage(const IntervalSet& s) const {
  return inverse().imagePartial(s).image;
}

PiecewiseTranslation PiecewiseTranslation::inverse() const {
  std::vector<TranslationPiece> inv;
  inv.reserve(pieces_.size());
  for (const auto& p : pieces_) inv.push_back({p.image(), -p.offset});
  sortBySource(inv);
  mergeTranslations(inv);
  PiecewiseTranslation t;
  t.pieces_ = std::move(inv);
  return t;
}

PiecewiseTranslation PiecewiseTranslation::restrictedTo(const IntervalSet& s) const {
  std::vector<TranslationPiece> out;
  sweep(pieces_, s, [&](const TranslationPiece& p, const Rational& lo, const Rational& hi) {
    out.push_back({Interval(lo, hi), p.offset});
  });
  mergeTranslations(out);
  PiecewiseTranslation t;
  t.pieces_ = std::move(out);
  return t;
}

bool operator==(const PiecewiseTranslation& a, const PiecewiseTranslation& b) {
  if (a.pieces_.size() != b.pieces_.size()) return false;
  for (std::size_t i = 0; i < a.pieces_.size(); ++i)
    if (!(a.pieces_[i].source == b.pieces_[i].source) || a.pieces_[i].offset != b.pieces_[i].offset) return false;
  return true;
}

PiecewiseTranslation compose(const PiecewiseTranslation& f, const PiecewiseTranslation& g) {
  std::vector<TranslationPiece> out;
  out.reserve(g.pieces_.size());
  for (const auto& gp : g.pieces_) {
    const Rational lo = gp.source.lo + gp.offset;
    const Rational hi = gp.source.hi + gp.offset;
    for (std::size_t k = firstEndingAfter(f.pieces_, lo); k < f.pieces_.size() && f.pieces_[k].source.lo < hi; ++k) {
      const auto& fp = f.pieces_[k];
      const Rational& a = fp.source.lo > lo ? fp.source.lo : lo;
      const Rational& b = fp.source.hi < hi ? fp.source.hi : hi;
      out.push_back({Interval(a - gp.offset, b - gp.offset), gp.offset + fp.offset});
    }
  }
  mergeTranslations(out);
  PiecewiseTranslation t;
  t.pieces_ = std::move(out);
  return t;
}

PiecewiseTranslation iterate(const PiecewiseTranslation& m, long long n) {
  if (n == 0) return PiecewiseTranslation::identity(m.domain());
  PiecewiseTranslation base = n > 0 ? m : m.inverse();
  unsigned long long k = n > 0 ? static_cast<unsigned long long>(n) : static_cast<unsigned long long>(-(n + 1)) + 1;
  std::optional<PiecewiseTranslation> acc;
  while (k > 0) {
    if (k & 1ULL) acc = acc ? compose(base, *acc) : base;
    k >>= 1ULL;
    if (k > 0) base = compose(base, base);
  }
  return *acc;
}

PiecewiseTranslation unite(const PiecewiseTranslation& a, const PiecewiseTranslation& b) {
  std::vector<TranslationPiece> all(a.pieces().begin(), a.pieces().end());
  all.insert(all.end(), b.pieces().begin(), b.pieces().end());
  return PiecewiseTranslation::fromPieces(std::move(all), false);
}

namespace {

// Elementary segments of the union of both domains, tagged with the offset
// each map applies there (if any).
template <typename OnSegment>
void overlay(const PiecewiseTranslation& f, const PiecewiseTranslation& g, OnSegment&& on) {
  std::vector<Rational> cuts;
  for (const auto& p : f.pieces()) {
    cuts.push_back(p.source.lo);
    cuts.push_back(p.source.hi);
  }
  for (const auto& p : g.pieces()) {
    cuts.push_back(p.source.lo);
    cuts.push_back(p.source.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const auto fp = f.pieces();
  const auto gp = g.pieces();
  std::size_t i = 0, j = 0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const Rational& lo = cuts[c];
    const Rational& hi = cuts[c + 1];
    while (i < fp.size() && fp[i].source.hi <= lo) ++i;
    while (j < gp.size() && gp[j].source.hi <= lo) ++j;
    const Rational* fo = (i < fp.size() && fp[i].source.lo <= lo) ? &fp[i].offset : nullptr;
    const Rational* go = (j < gp.size() && gp[j].source.lo <= lo) ? &gp[j].offset : nullptr;
    on(lo, hi, fo, go);
  }
}

}  // namespace

IntervalSet agreementSet(const PiecewiseTranslation& f, const PiecewiseTranslation& g) {
  std::vector<Interval> out;
  overlay(f, g, [&](const Rational& lo, const Rational& hi, const Rational* fo, const Rational* go) {
    if (fo && go && *fo == *go) out.push_back(Interval(lo, hi));
  });
  return IntervalSet::fromPieces(std::move(out));
}

IntervalSet disagreementSet(const PiecewiseTranslation& f, const PiecewiseTranslation& g) {
  std::vector<Interval> out;
  overlay(f, g, [&](const Rational& lo, const Rational& hi, const Rational* fo, const Rational* go) {
    if ((fo == nullptr) != (go == nullptr) || (fo && go && *fo != *go)) out.push_back(Interval(lo, hi));
  });
  return IntervalSet::fromPieces(std::move(out));
}

// ---------------------------------------------------------------------------
// PiecewiseAffineMap

PiecewiseAffineMap PiecewiseAffineMap::fromPieces(std::vector<AffinePiece> pieces) {
  for (const auto& p : pieces) require(p.scale > 0, "affine piece scale must be positive");
  sortBySource(pieces);
  checkDisjointSources(pieces);
  checkDisjointImages(pieces);
  mergeAffine(pieces);
  PiecewiseAffineMap m;
  m.pieces_ = std::move(pieces);
  return m;
}

PiecewiseAffineMap PiecewiseAffineMap::fromTranslation(const PiecewiseTranslation& t) {
  PiecewiseAffineMap m;
  m.pieces_.reserve(t.size());
  for (const auto& p : t.pieces()) m.pieces_.push_back({p.source, Rational(1), p.offset});
  return m;
}

PiecewiseAffineMap PiecewiseAffineMap::identity(const IntervalSet& on) {
  return fromTranslation(PiecewiseTranslation::identity(on));
}

IntervalSet PiecewiseAffineMap::domain() const {
  std::vector<Interval> out;
  for (const auto& p : pieces_) out.push_back(p.source);
  return IntervalSet::fromPieces(std::move(out));
}

IntervalSet PiecewiseAffineMap::range() const {
  std::vector<Interval> out;
  for (const auto& p : pieces_) out.push_back(p.image());
  return IntervalSet::fromPieces(std::move(out));
}

std::optional<Rational> PiecewiseAffineMap::apply(const Rational& x) const {
  const std::size_t k = firstEndingAfter(pieces_, x);
  if (k < pieces_.size() && pieces_[k].source.lo <= x) return pieces_[k].apply(x);
  return std::nullopt;
}

PartialImage PiecewiseAffineMap::imagePartial(const IntervalSet& s) const {
  std::vector<Interval> images;
  IntervalSet blocked = sweep(pieces_, s, [&](const AffinePiece& p, const Rational& lo, const Rational& hi) {
    images.push_back(Interval(p.apply(lo), p.apply(hi)));
  });
  return {IntervalSet::fromPieces(std::move(images)), std::move(blocked)};
}

IntervalSet PiecewiseAffineMap::image(const IntervalSet& s) const {
  auto r = imagePartial(s);
  if (!r.blocked.empty())
    throw PartiallyUndefinedError("set leaves the affine map's domain (" + describe(r.blocked) + ")",
                                  r.blocked.measure());
  return std::move(r.image);
}

PiecewiseAffineMap PiecewiseAffineMap::inverse() const {
  std::vector<AffinePiece> inv;
  inv.reserve(pieces_.size());
  for (const auto& p : pieces_) {
    Rational s = 1 / p.scale;
    Rational o = -p.offset * s;
    inv.push_back({p.image(), std::move(s), std::move(o)});
  }
  sortBySource(inv);
  mergeAffine(inv);
  PiecewiseAffineMap m;
  m.pieces_ = std::move(inv);
  return m;
}

PiecewiseAffineMap PiecewiseAffineMap::restrictedTo(const IntervalSet& s) const {
  std::vector<AffinePiece> out;
  sweep(pieces_, s, [&](const AffinePiece& p, const Rational& lo, const Rational& hi) {
    out.push_back({Interval(lo, hi), p.scale, p.offset});
  });
  mergeAffine(out);
  PiecewiseAffineMap m;
  m.pieces_ = std::move(out);
  return m;
}

bool PiecewiseAffineMap::isTranslation() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const AffinePiece& p) { return p.scale == 1; });
}

PiecewiseTranslation PiecewiseAffineMap::toTranslation() const {
  require(isTranslation(), "affine map has a non-unit scale");
  std::vector<TranslationPiece> out;
  out.reserve(pieces_.size());
  for (const auto& p : pieces_) out.push_back({p.source, p.offset});
  return PiecewiseTranslation::fromPieces(std::move(out), false);
}

bool operator==(const PiecewiseAffineMap& a, const PiecewiseAffineMap& b) {
  if (a.pieces_.size() != b.pieces_.size()) return false;
  for (std::size_t i = 0; i < a.pieces_.size(); ++i) {
    const auto& p = a.pieces_[i];
    const auto& q = b.pieces_[i];
    if (!(p.source == q.source) || p.scale != q.scale || p.offset != q.offset) return false;
  }
  return true;
}

PiecewiseAffineMap compose(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g) {
  const auto fp = f.pieces();
  std::vector<AffinePiece> fv(fp.begin(), fp.end());
  std::vector<AffinePiece> out;
  for (const auto& gpc : g.pieces()) {
    const Rational lo = gpc.apply(gpc.source.lo);
    const Rational hi = gpc.apply(gpc.source.hi);
    for (std::size_t k = firstEndingAfter(fv, lo); k < fv.size() && fv[k].source.lo < hi; ++k) {
      const auto& fpc = fv[k];
      const Rational& a = fpc.source.lo > lo ? fpc.source.lo : lo;
      const Rational& b = fpc.source.hi < hi ? fpc.source.hi : hi;
      out.push_back({Interval((a - gpc.offset) / gpc.scale, (b - gpc.offset) / gpc.scale), fpc.scale * gpc.scale,
                     fpc.scale * gpc.offset + fpc.offset});
    }
  }
  return PiecewiseAffineMap::fromPieces(std::move(out));
}

PiecewiseAffineMap unite(std::span<const PiecewiseAffineMap> parts) {
  std::vector<AffinePiece> all;
  for (const auto& m : parts) all.insert(all.end(), m.pieces().begin(), m.pieces().end());
  return PiecewiseAffineMap::fromPieces(std::move(all));
}

PiecewiseAffineMap normalizedTransport(const IntervalSet& from, const IntervalSet& to) {
  if (from.empty() && to.empty()) return {};
  if (from.empty() || to.empty())
    fail(ErrorKind::Precondition, "EmptySet", "normalized transport needs two nonempty sets or two empty sets");
  const Rational scale = to.measure() / from.measure();
  std::vector<AffinePiece> out;
  const auto fp = from.pieces();
  const auto tp = to.pieces();
  std::size_t i = 0, j = 0;
  Rational x = fp[0].lo;
  Rational y = tp[0].lo;
  while (i < fp.size() && j < tp.size()) {
    const Rational fromLeft = fp[i].hi - x;
    const Rational toLeft = (tp[j].hi - y) / scale;
    const Rational step = fromLeft < toLeft ? fromLeft : toLeft;
    out.push_back({Interval(x, x + step), scale, y - scale * x});
    x += step;
    y += step * scale;
    if (x == fp[i].hi && ++i < fp.size()) x = fp[i].lo;
    if (y == tp[j].hi && ++j < tp.size()) y = tp[j].lo;
  }
  return PiecewiseAffineMap::fromPieces(std::move(out));
}

PiecewiseTranslation conjugate(const PiecewiseAffineMap& phi, const PiecewiseTranslation& t) {
  const auto inner = compose(PiecewiseAffineMap::fromTranslation(t), phi);
  return compose(phi.inverse(), inner).toTranslation();
}

}  // namespace ergo
