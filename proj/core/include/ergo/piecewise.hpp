#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ergo/interval_set.hpp"

namespace ergo {

struct TranslationPiece {
  Interval source;
  Rational offset;

  Interval image() const { return Interval(source.lo + offset, source.hi + offset); }
};

/// Result of pushing a set through a partial map: the image of the defined
/// part, and the part of the input the map could not resolve.
struct PartialImage {
  IntervalSet image;
  IntervalSet blocked;
};

/// A finite-stage invertible map of [0,1): x ↦ x + offset on each source
/// interval, undefined on the residual (complement of the sources).
class PiecewiseTranslation {
 public:
  PiecewiseTranslation() = default;

  /// Sorts, validates disjointness of sources and images, merges touching
  /// pieces with equal offsets. `requireUnit` also checks images ⊆ [0,1).
  static PiecewiseTranslation fromPieces(std::vector<TranslationPiece> pieces, bool requireUnit = true);
  static PiecewiseTranslation identity(const IntervalSet& on = IntervalSet::unit());

  std::span<const TranslationPiece> pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }

  IntervalSet domain() const;
  IntervalSet range() const;
  IntervalSet undefinedResidual() const;

  std::optional<Rational> apply(const Rational& x) const;
  PartialImage imagePartial(const IntervalSet& s) const;
  /// Throws PartiallyUndefinedError when s meets the undefined residual.
  IntervalSet image(const IntervalSet& s) const;
  IntervalSet preimage(const IntervalSet& s) const;

  PiecewiseTranslation inverse() const;
  PiecewiseTranslation restrictedTo(const IntervalSet& s) const;

  friend bool operator==(const PiecewiseTranslation& a, const PiecewiseTranslation& b);

 private:
  std::vector<TranslationPiece> pieces_;
  friend PiecewiseTranslation compose(const PiecewiseTranslation& f, const PiecewiseTranslation& g);
};

/// f ∘ g, defined where g is defined and g(x) lies in the domain of f.
PiecewiseTranslation compose(const PiecewiseTranslation& f, const PiecewiseTranslation& g);

/// n-fold composition; negative n iterates the inverse; n = 0 is the
/// identity on the domain of m.
PiecewiseTranslation iterate(const PiecewiseTranslation& m, long long n);

/// Joins two maps with disjoint domains and disjoint images.
PiecewiseTranslation unite(const PiecewiseTranslation& a, const PiecewiseTranslation& b);

/// Points where both maps are defined and agree.
IntervalSet agreementSet(const PiecewiseTranslation& f, const PiecewiseTranslation& g);
/// Points where exactly one map is defined, or both are and disagree.
IntervalSet disagreementSet(const PiecewiseTranslation& f, const PiecewiseTranslation& g);

struct AffinePiece {
  Interval source;
  Rational scale;  // > 0
  Rational offset;

  Rational apply(const Rational& x) const { return scale * x + offset; }
  Interval image() const { return Interval(apply(source.lo), apply(source.hi)); }
};

/// Order-preserving-per-piece affine map x ↦ scale·x + offset with disjoint
/// sources and disjoint images.
class PiecewiseAffineMap {
 public:
  PiecewiseAffineMap() = default;
  static PiecewiseAffineMap fromPieces(std::vector<AffinePiece> pieces);
  static PiecewiseAffineMap fromTranslation(const PiecewiseTranslation& t);
  static PiecewiseAffineMap identity(const IntervalSet& on);

  std::span<const AffinePiece> pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }

  IntervalSet domain() const;
  IntervalSet range() const;

  std::optional<Rational> apply(const Rational& x) const;
  PartialImage imagePartial(const IntervalSet& s) const;
  IntervalSet image(const IntervalSet& s) const;

  PiecewiseAffineMap inverse() const;
  PiecewiseAffineMap restrictedTo(const IntervalSet& s) const;

  bool isTranslation() const;
  /// Throws unless every scale is 1.
  PiecewiseTranslation toTranslation() const;

  friend bool operator==(const PiecewiseAffineMap& a, const PiecewiseAffineMap& b);

 private:
  std::vector<AffinePiece> pieces_;
};

PiecewiseAffineMap compose(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g);

/// Joins affine maps with disjoint domains and images.
PiecewiseAffineMap unite(std::span<const PiecewiseAffineMap> parts);

/// The order-preserving bijection from `from` onto `to` with constant scale
/// μ(to)/μ(from). Both empty gives the empty map; one empty is an error.
PiecewiseAffineMap normalizedTransport(const IntervalSet& from, const IntervalSet& to);

/// phi⁻¹ ∘ t ∘ phi, returned as a translation (scales must cancel).
PiecewiseTranslation conjugate(const PiecewiseAffineMap& phi, const PiecewiseTranslation& t);

}  // namespace ergo
