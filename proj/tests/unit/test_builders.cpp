#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "ergo/builders.hpp"
#include "ergo/errors.hpp"
#include "ergo/recurrence.hpp"
#include "grid_oracle.hpp"

using namespace ergo;

namespace {

Rational R(long long p, long long q = 1) { return makeRational(p, q); }

StagedTransformation build(const std::string& name, int stage) { return buildStage(*builtinRecipe(name), stage); }

// Direct recursion h_k = (k+1)h_{k-1} + k(k+1)/2 with h_0 = 1.
long long staircaseHeight(int k) {
  long long h = 1;
  for (long long i = 1; i <= k; ++i) h = (i + 1) * h + i * (i + 1) / 2;
  return h;
}

}  // namespace

TEST(Builders, OdometerStageOne) {
  const auto t = build("odometer", 1);
  EXPECT_EQ(t.height(), 2);
  ASSERT_EQ(t.map.size(), 1u);
  EXPECT_EQ(t.map.pieces()[0].source, Interval(0, R(1, 2)));
  EXPECT_EQ(t.map.pieces()[0].offset, R(1, 2));
  EXPECT_EQ(t.map.undefinedResidual(), IntervalSet::interval(R(1, 2), 1));
}

TEST(Builders, OdometerHeightsDouble) {
  for (int n = 1; n <= 10; ++n) EXPECT_EQ(build("odometer", n).height(), 1LL << n);
  EXPECT_THROW(build("odometer", 0), Error);
}

TEST(Builders, StaircaseHeightsFollowRecursion) {
  for (int k = 0; k <= 6; ++k) EXPECT_EQ(stageHeights(*builtinRecipe("staircase"), k).back(), staircaseHeight(k));
  EXPECT_EQ(build("staircase", 4).height(), staircaseHeight(4));
}

TEST(Builders, ChaconHeights) {
  const auto hs = stageHeights(*builtinRecipe("chacon"), 5);
  for (std::size_t k = 1; k < hs.size(); ++k) EXPECT_EQ(hs[k], 3 * hs[k - 1] + 1);
}

TEST(Builders, ColumnLevelsAreStackedByTheMap) {
  for (const auto& [name, stage] : std::vector<std::pair<std::string, int>>{{"odometer", 4}, {"staircase", 3}, {"chacon", 3}}) {
    const auto t = build(name, stage);
    for (long long i = 0; i + 1 < t.height(); ++i) EXPECT_EQ(t.map.image(t.level(i)), t.level(i + 1)) << name << " " << i;
    EXPECT_EQ(t.map.domain() | t.level(t.height() - 1), IntervalSet::unit()) << name;
  }
}

TEST(Builders, MeasurePreservedOnRandomSets) {
  std::mt19937 g(3);
  for (const auto& [name, stage] : std::vector<std::pair<std::string, int>>{{"odometer", 5}, {"staircase", 3}, {"rotation3", 1}}) {
    const auto t = build(name, stage);
    const long long D = oracle::gridFor(t.map) * 4;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Interval> v;
      for (long long k = 0; k < D; ++k)
        if (g() % 3 == 0) v.emplace_back(R(k, D), R(k + 1, D));
      const IntervalSet A = IntervalSet::fromPieces(v);
      const auto r = t.map.imagePartial(A);
      EXPECT_EQ(r.image.measure(), A.measure() - r.blocked.measure());
      EXPECT_EQ(r.blocked, A & t.map.undefinedResidual());
    }
  }
}

TEST(Builders, RotationTwoIsAnInvolution) {
  const auto t = build("rotation2", 1);
  EXPECT_TRUE(t.map.undefinedResidual().empty());
  EXPECT_EQ(iterate(t.map, 2), PiecewiseTranslation::identity());
}

TEST(Builders, RigidityTimes) {
  EXPECT_EQ(rigiditySequence(*builtinRecipe("odometer"), 3), (std::vector<long long>{2, 4, 8}));
  EXPECT_TRUE(rigiditySequence(*builtinRecipe("identity"), 0).empty());
  EXPECT_THROW(rigiditySequence(*builtinRecipe("staircase"), 2), Error);
}

TEST(Builders, OdometerLevelReturnsAtRigidTime) {
  // Closed odometer: the top level wraps to the base, so T^8 = id at stage 3.
  Recipe closed = *builtinRecipe("odometer");
  closed.wrap = true;
  const auto t2 = buildStage(closed, 2);
  const auto t3 = buildStage(closed, 3);
  const IntervalSet A = t2.level(1);
  // Brute force on the stage-3 permutation of eight levels.
  const long long D = 8;
  const auto cm = oracle::cellMap(t3.map, D);
  const auto cA = oracle::cells(A, D);
  const auto brute = oracle::correlation(cm, cA, cA, 4, D);
  EXPECT_EQ(brute.blocked, 0);
  EXPECT_EQ(brute.lower, A.measure());
  EXPECT_EQ(correlation(t3.map, A, A, 4), A.measure());
}

TEST(Builders, RecipeFiles) {
  const Recipe r = parseRecipe("name: mine\ncuts: 3\nspacers: [0,1,0]\n# chacon by hand\n");
  EXPECT_EQ(r.name, "mine");
  EXPECT_EQ(stageHeights(r, 4), stageHeights(*builtinRecipe("chacon"), 4));
  const Recipe s = parseRecipe("stair\ncuts: n+1\nspacers: j\n");
  EXPECT_EQ(stageHeights(s, 5), stageHeights(*builtinRecipe("staircase"), 5));
  EXPECT_THROW(parseRecipe("name: bad\ncuts: n*2\n"), Error);
  EXPECT_THROW(parseRecipe("name: bad\nwhat: 3\n"), Error);

  const auto path = std::filesystem::temp_directory_path() / "ergo_recipe_test.txt";
  std::ofstream(path) << "name: filed\ncuts: 2\nspacers: 1\nclose: wrap\n";
  const Recipe f = loadRecipe(path.string());
  EXPECT_EQ(f.name, "filed");
  EXPECT_TRUE(f.wrap);
  EXPECT_TRUE(buildStage(f, 3).map.undefinedResidual().empty());
  EXPECT_THROW(loadRecipe("/nonexistent/recipe"), Error);
}

TEST(Builders, StageBudget) {
  BuildOptions small;
  small.pieceBudget = 100;
  EXPECT_THROW(buildStage(*builtinRecipe("odometer"), 8, small), Error);
  try {
    stageHeights(*builtinRecipe("staircase"), 40);
    FAIL() << "expected StageTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.name(), "StageTooLarge");
    EXPECT_EQ(e.kind(), ErrorKind::StageExhausted);
  }
}

TEST(Builders, NormalizationKeepsEarlierStagesConsistent) {
  BuildOptions o;
  o.normalizeAt = 4;
  const auto t2 = buildStage(*builtinRecipe("staircase"), 2, o);
  const auto t4 = buildStage(*builtinRecipe("staircase"), 4, o);
  // The later stage refines the earlier map where both are defined.
  EXPECT_EQ(agreementSet(t2.map, t4.map), t2.map.domain());
}
