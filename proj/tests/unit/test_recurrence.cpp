#include <gtest/gtest.h>

#include <random>

#include "ergo/builders.hpp"
#include "ergo/errors.hpp"
#include "ergo/recurrence.hpp"
#include "grid_oracle.hpp"

using namespace ergo;

namespace {

Rational R(long long p, long long q = 1) { return makeRational(p, q); }
IntervalSet I(long long a, long long b, long long q) { return IntervalSet::interval(R(a, q), R(b, q)); }

StagedTransformation build(const std::string& name, int stage, bool wrap = false) {
  Recipe r = *builtinRecipe(name);
  if (wrap) r.wrap = true;
  return buildStage(r, stage);
}

IntervalSet randomCells(std::mt19937& g, long long D, int oneIn) {
  std::vector<Interval> v;
  for (long long k = 0; k < D; ++k)
    if (g() % oneIn == 0) v.emplace_back(R(k, D), R(k + 1, D));
  return IntervalSet::fromPieces(v);
}

}  // namespace

TEST(Correlation, RotationByHalf) {
  const auto t = build("rotation2", 1);
  EXPECT_EQ(correlation(t.map, I(0, 1, 2), I(0, 1, 2), 1), 0);
  EXPECT_EQ(correlation(t.map, I(0, 1, 2), I(0, 1, 2), 2), R(1, 2));
}

TEST(Correlation, IdentityKeepsMeasure) {
  const auto id = PiecewiseTranslation::identity();
  const IntervalSet A = I(1, 4, 7);
  for (long long n : {0, 1, 5, -3}) EXPECT_EQ(correlation(id, A, A, n), A.measure());
}

TEST(Correlation, UndefinedResidualRaises) {
  const auto t = build("odometer", 1);
  try {
    correlation(t.map, I(1, 2, 2), I(0, 1, 2), 1);
    FAIL();
  } catch (const PartiallyUndefinedError& e) {
    EXPECT_EQ(e.blockedMass(), R(1, 2));
  }
  const auto b = correlationBounds(t.map, IntervalSet::unit(), I(0, 1, 2), 1);
  EXPECT_EQ(b.lower, 0);
  EXPECT_EQ(b.blocked, R(1, 2));
  EXPECT_EQ(b.upper, R(1, 2));
}

TEST(CorrelationTable, MatchesCellOracle) {
  std::mt19937 g(5);
  const auto t = build("staircase", 3);
  const long long D = oracle::gridFor(t.map);
  const auto cm = oracle::cellMap(t.map, D);
  for (int trial = 0; trial < 10; ++trial) {
    const IntervalSet A = randomCells(g, D, 4), B = randomCells(g, D, 3);
    const auto cA = oracle::cells(A, D), cB = oracle::cells(B, D);
    const auto table = correlationTable(t.map, A, B, 20);
    for (long long n = 1; n <= 20; ++n) {
      const auto want = oracle::correlation(cm, cA, cB, n, D);
      const auto got = table.at(n);
      EXPECT_EQ(got.lower, want.lower) << n;
      EXPECT_EQ(got.blocked, want.blocked) << n;
      // μ(T^{-n}A ∩ B) = μ(A ∩ TⁿB): exact rows must match, others must bracket it.
      const auto back = oracle::correlation(cm, cB, cA, n, D);
      const auto neg = table.at(-n);
      if (neg.exact() && back.blocked == 0) EXPECT_EQ(neg.lower, back.lower) << -n;
      if (back.blocked == 0) {
        EXPECT_LE(neg.lower, back.lower);
        EXPECT_GE(neg.upper, back.lower);
      }
    }
  }
}

TEST(CorrelationTable, CsvIsExactRatios) {
  const auto t = build("rotation2", 1);
  const auto table = correlationTable(t.map, I(0, 1, 2), I(0, 1, 2), 2);
  std::ostringstream out;
  table.writeCsv(out);
  EXPECT_EQ(out.str(),
            "n,num,den,muA2_num,muA2_den,margin_num,margin_den\n"
            "-2,1,2,1,4,1,4\n-1,0,1,1,4,-1,4\n0,1,2,1,4,1,4\n1,0,1,1,4,-1,4\n2,1,2,1,4,1,4\n");
}

TEST(Classify, OdometerHalvesAreStrictlyUnder) {
  const auto v = classify(build("odometer", 1).map, I(0, 1, 2), 1);
  EXPECT_EQ(v.kind, VerdictKind::StrictlyUnderRecurrent);
  EXPECT_EQ(v.name(), "strictlyUnderRecurrent");
  EXPECT_EQ(v.horizon, 1);
  EXPECT_EQ(v.margin, R(1, 4));
}

TEST(Classify, InvariantSetIsStrictlyOver) {
  const auto id = PiecewiseTranslation::identity();
  const IntervalSet A = I(1, 3, 5);
  const auto v = classify(id, A, 7);
  EXPECT_EQ(v.kind, VerdictKind::StrictlyOverRecurrent);
  EXPECT_EQ(v.margin, A.measure() - A.measure() * A.measure());
}

TEST(Classify, RotationNeitherOverNorUnder) {
  // Correlations alternate 0 and 1/2 around 1/4, so no variant holds.
  const auto v = classify(build("rotation2", 1).map, I(0, 1, 2), 2);
  EXPECT_EQ(v.kind, VerdictKind::None);
  ASSERT_TRUE(v.witness.has_value());
  // A = [0,3/4): values 1/2, 3/4 against μ² = 9/16, so only the relaxed bound (1−ε)μ² holds.
  const auto e = classify(build("rotation2", 1).map, I(0, 3, 4), 2, R(1, 4));
  EXPECT_EQ(e.kind, VerdictKind::EpsOverRecurrent);
  EXPECT_EQ(e.name(), "epsOverRecurrent(1/4)");
  EXPECT_EQ(e.margin, R(1, 2) - R(3, 4) * R(9, 16));
}

TEST(Classify, UndecidedRaises) {
  const auto t = build("odometer", 2);
  EXPECT_THROW(classify(t.map, t.level(0) | t.level(3), 3), PartiallyUndefinedError);
}

TEST(LemmaPairs, RequiredN) {
  EXPECT_EQ(requiredN(R(1, 2), R(1, 10)), 6);
  EXPECT_EQ(requiredN(R(1, 4), R(1, 20)), 6);
  EXPECT_EQ(requiredN(R(1, 3), R(1, 9)), 4);
}

TEST(LemmaPairs, ThreeSetExample) {
  const std::vector<IntervalSet> sets{I(0, 1, 2), I(1, 3, 4), I(0, 1, 4) | I(2, 3, 4)};
  const auto r = lemmaPairSearch(sets, R(1, 4));
  EXPECT_EQ(r.value, R(1, 4));
  EXPECT_EQ(r.j, 1u);
  EXPECT_EQ(r.k, 2u);
  EXPECT_TRUE(r.boundMet);
}

TEST(LemmaPairs, IdenticalCopies) {
  const IntervalSet A = I(0, 1, 3);
  const auto r = lemmaPairSearch(std::vector<IntervalSet>(4, A), R(1, 10));
  EXPECT_EQ(r.value, A.measure());
}

TEST(LemmaPairs, RandomFamiliesAgainstEnumeration) {
  std::mt19937 g(9);
  const long long D = 64;
  for (int trial = 0; trial < 30; ++trial) {
    const long long k = 16;  // α = 1/4
    const Rational eps(1, 10);
    const long long N = requiredN(R(1, 4), eps);
    std::vector<IntervalSet> sets;
    for (long long s = 0; s < N; ++s) {
      std::vector<long long> idx(D);
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), g);
      std::vector<Interval> v;
      for (long long i = 0; i < k; ++i) v.emplace_back(R(idx[i], D), R(idx[i] + 1, D));
      sets.push_back(IntervalSet::fromPieces(v));
    }
    const auto r = lemmaPairSearch(sets, eps);
    Rational best = -1;
    for (std::size_t a = 0; a < sets.size(); ++a)
      for (std::size_t b = a + 1; b < sets.size(); ++b) {
        const Rational v = intersectionMeasure(sets[a], sets[b]);
        if (v > best) best = v;
      }
    EXPECT_EQ(r.value, intersectionMeasure(sets[r.j - 1], sets[r.k - 1]));
    EXPECT_GT(r.value, R(1, 16) - eps);
    EXPECT_LE(r.value, best);
  }
}

TEST(MeanErgodic, Examples) {
  const IntervalSet A = I(1, 3, 8);
  EXPECT_EQ(meanErgodicAverage(PiecewiseTranslation::identity(), A, 9), A.measure());
  EXPECT_EQ(meanErgodicAverage(build("rotation2", 1).map, I(0, 1, 2), 2), R(1, 4));
  const auto t = build("odometer", 4, true);
  const IntervalSet B = t.level(2) | t.level(5) | t.level(11);
  const Rational v = meanErgodicAverage(t.map, B, 16);
  const Rational mu2 = B.measure() * B.measure();
  EXPECT_LE(abs(v - mu2), R(1, 20));
}

TEST(UnderWitness, Examples) {
  EXPECT_EQ(underRecurrenceWitness(build("odometer", 1).map, I(0, 1, 2), 1, 1), 1);
  EXPECT_FALSE(underRecurrenceWitness(PiecewiseTranslation::identity(), I(0, 1, 3), 1, 10).has_value());
}

TEST(UnderWitness, NonLevelSetOnOdometer) {
  const auto t = build("odometer", 4, true);
  // Left thirds of a few levels do not align with the dyadic column.
  IntervalSet A;
  for (long long i : {0, 3, 4, 9}) {
    const IntervalSet L = t.level(i);
    A = A | L.prefixOfMeasure(L.measure() / 3);
  }
  const auto n = underRecurrenceWitness(t.map, A, 1, 15);
  ASSERT_TRUE(n.has_value());
  EXPECT_LT(correlation(t.map, A, A, *n), A.measure() * A.measure());
}

TEST(UnderWitness, SkipsUndecidedN) {
  const auto t = build("odometer", 3);
  // n = 1 straddles μ² = 9/64 because level 7 has no image; n = 2 is below it.
  const IntervalSet A = t.level(0) | t.level(1) | t.level(7);
  EXPECT_EQ(underRecurrenceWitness(t.map, A, 1, 7), 2);
  EXPECT_THROW(underRecurrenceWitness(t.map, A, 1, 1), Error);
}
