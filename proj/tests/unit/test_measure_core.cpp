#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ergo/errors.hpp"
#include "ergo/interval_set.hpp"
#include "ergo/piecewise.hpp"
#include "ergo/rational.hpp"
#include "ergo/serialize.hpp"
#include "grid_oracle.hpp"

using namespace ergo;

namespace {

Rational R(long long p, long long q = 1) { return makeRational(p, q); }
IntervalSet I(long long a, long long b, long long q) { return IntervalSet::interval(R(a, q), R(b, q)); }

// Random union of cells of the grid 1/D.
IntervalSet randomSet(std::mt19937& g, long long D) {
  std::vector<Interval> v;
  for (long long k = 0; k < D; ++k)
    if (g() % 2) v.emplace_back(R(k, D), R(k + 1, D));
  return IntervalSet::fromPieces(v);
}

PiecewiseTranslation rotation(long long p, long long q) {
  // x ↦ x + p/q mod 1 as a two-piece exchange.
  const Rational c = R(q - p, q);
  return PiecewiseTranslation::fromPieces({{Interval(0, c), R(p, q)}, {Interval(c, 1), -c}});
}

}  // namespace

TEST(Rational, ParseAndFormat) {
  EXPECT_EQ(parseRational("3/6"), R(1, 2));
  EXPECT_EQ(parseRational("-2"), R(-2));
  EXPECT_EQ(formatRational(R(0)), "0/1");
  EXPECT_EQ(formatRational(R(3)), "3/1");
  EXPECT_THROW(parseRational("1/0"), Error);
  EXPECT_THROW(parseRational("1/-2"), Error);
  EXPECT_THROW(parseRational("x"), Error);
  EXPECT_EQ(floorToInt(R(-1, 2)), -1);
}

TEST(IntervalSet, Measures) {
  EXPECT_EQ(I(0, 1, 2).measure(), R(1, 2));
  EXPECT_EQ(IntervalSet().measure(), 0);
  EXPECT_EQ((I(0, 1, 3) | I(3, 4, 6)).measure(), R(1, 2));
}

TEST(IntervalSet, AlgebraExamples) {
  EXPECT_EQ(I(0, 1, 2) & I(1, 3, 4), I(1, 2, 4));
  const IntervalSet u = I(0, 1, 4) | I(1, 2, 4);
  EXPECT_EQ(u.size(), 1u);
  EXPECT_EQ(u, I(0, 1, 2));
  const IntervalSet a = I(1, 5, 7) | I(6, 7, 7);
  EXPECT_TRUE((a ^ a).empty());
}

TEST(IntervalSet, UnitMembership) {
  EXPECT_TRUE(I(1, 3, 4).withinUnit());
  EXPECT_FALSE(I(1, 3, 4).translated(R(1, 2)).withinUnit());
  EXPECT_TRUE(IntervalSet::interval(R(1, 2), R(1, 4)).empty());
  EXPECT_THROW(Interval(R(1, 2), R(1, 4)), Error);
}

TEST(IntervalSet, AlgebraMatchesCellOracle) {
  std::mt19937 g(7);
  const long long D = 24;
  for (int trial = 0; trial < 200; ++trial) {
    const IntervalSet a = randomSet(g, D), b = randomSet(g, D);
    const auto ca = oracle::cells(a, D), cb = oracle::cells(b, D);
    std::vector<char> u(D), x(D), d(D), s(D);
    for (long long k = 0; k < D; ++k) {
      u[k] = ca[k] || cb[k];
      x[k] = ca[k] && cb[k];
      d[k] = ca[k] && !cb[k];
      s[k] = ca[k] != cb[k];
    }
    EXPECT_EQ(oracle::cells(a | b, D), u);
    EXPECT_EQ(oracle::cells(a & b, D), x);
    EXPECT_EQ(oracle::cells(a - b, D), d);
    EXPECT_EQ(oracle::cells(a ^ b, D), s);
    EXPECT_EQ(intersectionMeasure(a, b), oracle::measure(x, D));
    EXPECT_EQ(a.measure(), oracle::measure(ca, D));
  }
}

TEST(IntervalSet, PrefixAndQuantile) {
  const IntervalSet s = I(0, 1, 4) | I(2, 3, 4);
  EXPECT_EQ(s.prefixOfMeasure(R(3, 8)), I(0, 1, 4) | I(4, 5, 8));
  EXPECT_EQ(s.quantile(R(1, 4)), R(1, 4));
  EXPECT_EQ(s.quantile(R(3, 8)), R(5, 8));
  EXPECT_THROW(s.prefixOfMeasure(R(1)), Error);
}

TEST(PiecewiseTranslation, ImageExamples) {
  const auto rot = rotation(1, 2);
  EXPECT_EQ(rot.image(I(0, 1, 4)), I(2, 3, 4));
  const auto id = PiecewiseTranslation::identity();
  EXPECT_EQ(id.image(I(1, 3, 5)), I(1, 3, 5));
  const auto odo1 = PiecewiseTranslation::fromPieces({{Interval(0, R(1, 2)), R(1, 2)}}, false);
  EXPECT_EQ(odo1.image(I(0, 1, 2)), I(1, 2, 2));
  EXPECT_EQ(odo1.undefinedResidual(), I(1, 2, 2));
}

TEST(PiecewiseTranslation, PartialImageReportsBlockedMass) {
  const auto odo1 = PiecewiseTranslation::fromPieces({{Interval(0, R(1, 2)), R(1, 2)}}, false);
  const auto r = odo1.imagePartial(I(1, 3, 4));
  EXPECT_EQ(r.image, I(3, 4, 4));
  EXPECT_EQ(r.blocked, I(2, 3, 4));
  EXPECT_THROW(odo1.image(I(1, 3, 4)), PartiallyUndefinedError);
}

TEST(PiecewiseTranslation, RejectsOverlap) {
  EXPECT_THROW(PiecewiseTranslation::fromPieces({{Interval(0, R(1, 2)), R(1, 4)}, {Interval(R(1, 2), 1), R(-1, 2)}}),
               Error);
}

TEST(PiecewiseTranslation, IterateExamples) {
  const auto rot = rotation(1, 2);
  EXPECT_EQ(iterate(rot, 0), PiecewiseTranslation::identity(rot.domain()));
  // Rotation by 1/4 as a 4-piece cycle.
  std::vector<TranslationPiece> cyc;
  for (int k = 0; k < 4; ++k) cyc.push_back({Interval(R(k, 4), R(k + 1, 4)), k < 3 ? R(1, 4) : R(-3, 4)});
  const auto q = PiecewiseTranslation::fromPieces(cyc);
  EXPECT_EQ(iterate(q, 4), PiecewiseTranslation::identity());
  EXPECT_EQ(compose(iterate(q, -1), q), PiecewiseTranslation::identity());
}

TEST(PiecewiseTranslation, IterateMatchesCellOracle) {
  std::mt19937 g(11);
  const long long D = 30;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<long long> perm(D);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g);
    std::vector<TranslationPiece> ps;
    const long long undefinedCell = trial % 2 ? static_cast<long long>(g() % D) : -1;
    for (long long k = 0; k < D; ++k)
      if (k != undefinedCell) ps.push_back({Interval(R(k, D), R(k + 1, D)), R(perm[k] - k, D)});
    const auto m = PiecewiseTranslation::fromPieces(ps, false);
    const auto cm = oracle::cellMap(m, D);
    const IntervalSet A = randomSet(g, D);
    const auto cA = oracle::cells(A, D);
    for (long long n : {1, 2, 3, 7}) {
      const auto it = iterate(m, n);
      const auto got = it.imagePartial(A);
      std::vector<char> img(D, 0), lost(D, 0);
      for (long long k = 0; k < D; ++k) {
        if (!cA[k]) continue;
        long long x = k;
        for (long long i = 0; i < n && x >= 0; ++i) x = cm[x];
        if (x < 0) lost[k] = 1;
        else img[x] = 1;
      }
      EXPECT_EQ(oracle::cells(got.image, D), img);
      EXPECT_EQ(oracle::cells(got.blocked, D), lost);
      EXPECT_EQ(got.image.measure() + got.blocked.measure(), A.measure());
    }
  }
}

TEST(PiecewiseTranslation, UniteAndAgreement) {
  const auto a = PiecewiseTranslation::fromPieces({{Interval(0, R(1, 4)), R(1, 2)}}, false);
  const auto b = PiecewiseTranslation::fromPieces({{Interval(R(1, 2), R(3, 4)), R(1, 4)}}, false);
  const auto u = unite(a, b);
  EXPECT_EQ(u.domain(), I(0, 1, 4) | I(2, 3, 4));
  const auto rot = rotation(1, 2);
  EXPECT_EQ(agreementSet(u, rot), I(0, 1, 4));
  EXPECT_EQ(disagreementSet(u, rot), I(1, 4, 4));
}

TEST(NormalizedTransport, EqualMeasure) {
  const auto f = normalizedTransport(I(0, 1, 2), I(1, 2, 2));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.pieces()[0].scale, 1);
  EXPECT_EQ(f.pieces()[0].offset, R(1, 2));
}

TEST(NormalizedTransport, HalvingPushesNormalizedMeasureForward) {
  const auto f = normalizedTransport(I(0, 1, 2), I(0, 1, 4));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.pieces()[0].scale, R(1, 2));
  EXPECT_EQ(f.pieces()[0].offset, 0);
  // Normalized measure of each test subinterval equals that of its image.
  for (const auto& s : {I(0, 1, 8), I(1, 3, 8), I(1, 4, 16)}) {
    const IntervalSet img = f.image(s);
    EXPECT_EQ(img.measure() / R(1, 4), s.measure() / R(1, 2));
  }
}

TEST(NormalizedTransport, TwoPieceSource) {
  const auto f = normalizedTransport(I(0, 1, 4) | I(2, 3, 4), I(0, 1, 2));
  ASSERT_EQ(f.size(), 2u);
  IntervalSet images;
  for (const auto& p : f.pieces()) {
    EXPECT_EQ(p.scale, 1);
    const IntervalSet img = IntervalSet::interval(p.image().lo, p.image().hi);
    EXPECT_FALSE(img.intersects(images));
    images = images | img;
  }
  EXPECT_EQ(images, I(0, 1, 2));
  EXPECT_THROW(normalizedTransport(IntervalSet(), I(0, 1, 2)), Error);
}

TEST(Conjugate, MatchesPointwiseComposition) {
  const auto phi = normalizedTransport(I(0, 1, 2), IntervalSet::unit());
  const auto t = rotation(1, 4);
  const auto c = conjugate(phi, t);
  EXPECT_EQ(c.domain(), I(0, 1, 2));
  for (long long k = 0; k < 16; ++k) {
    const Rational x = R(k, 32);
    const Rational want = *phi.inverse().apply(*t.apply(*phi.apply(x)));
    EXPECT_EQ(*c.apply(x), want);
  }
}

TEST(Serialize, RoundTrip) {
  const auto t = rotation(1, 3);
  std::stringstream s;
  writeTranslation(s, t);
  EXPECT_EQ(readTranslation(s), t);
  const IntervalSet a = I(0, 1, 5) | I(3, 4, 5);
  std::stringstream u;
  writeSet(u, a);
  EXPECT_EQ(readSet(u), a);
  EXPECT_EQ(parseSetSpec(formatSetSpec(a)), a);
  EXPECT_EQ(parseSetSpec("0/1:1/2"), I(0, 1, 2));
  EXPECT_THROW(parseSetSpec("0/1-1/2"), Error);
  std::stringstream bad("1\n0/1 1/2\n");
  EXPECT_THROW(readTranslation(bad), Error);
}
