#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ergo/piecewise.hpp"
#include "ergo/tower.hpp"

namespace ergo {

/// Integer expression over the stage index n and subcolumn index j.
/// Grammar: `c`, `n`, `j`, `n+c`, `n-c`, `j+c`, `j-c`, or a list `[c0,c1,...]`
/// indexed by j (the last entry repeats).
class RecipeExpr {
 public:
  static RecipeExpr parse(std::string_view text);
  static RecipeExpr constant(long long c);
  long long eval(long long n, long long j) const;
  std::string text() const { return text_; }

 private:
  enum class Var { None, N, J, List };
  Var var_ = Var::None;
  long long c_ = 0;
  std::vector<long long> list_;
  std::string text_;
};

struct Recipe {
  enum class Kind { CutAndStack, Rotation };

  std::string name;
  Kind kind = Kind::CutAndStack;
  RecipeExpr cuts = RecipeExpr::constant(2);
  RecipeExpr spacers = RecipeExpr::constant(0);
  bool rigid = false;
  bool wrap = false;   // top level maps to the base instead of staying undefined
  long long period = 1;  // Rotation only

  long long cutsAt(long long step) const;
  long long spacersAt(long long step, long long j) const;
};

/// Built-ins: odometer, staircase, chacon, identity, rotation<q> (e.g. rotation2).
std::optional<Recipe> builtinRecipe(std::string_view name);
/// Plain-text recipe: `name: x` (or a bare first line), `cuts: e`, `spacers: e`,
/// optional `rigid: yes`, `close: wrap`. `#` starts a comment.
Recipe parseRecipe(std::string_view text);
/// A built-in name, or else a path to a recipe file.
Recipe loadRecipe(const std::string& nameOrPath);

/// Column heights h_0..h_stage (h_0 = 1).
std::vector<long long> stageHeights(const Recipe& r, int stage);

struct BuildOptions {
  std::optional<int> normalizeAt;  // stage whose column fills [0,1); defaults to the built stage
  long long pieceBudget = 4'000'000;
};

struct StagedTransformation {
  Recipe recipe;
  int stage = 0;
  PiecewiseTranslation map;
  std::vector<Rational> levelLo;  // left endpoints of the column, bottom to top
  Rational width;                 // common level width
  std::vector<long long> heights; // h_0..h_stage

  long long height() const { return static_cast<long long>(levelLo.size()); }
  IntervalSet level(long long i) const;
  /// Union of the levels with indices in [from, to).
  IntervalSet levelRange(long long from, long long to) const;
  Tower column() const;
};

StagedTransformation buildStage(const Recipe& r, int stage, const BuildOptions& opts = {});

/// Tower heights h_1..h_count for rigid recipes; NotRigid otherwise.
std::vector<long long> rigiditySequence(const Recipe& r, int count);

}  // namespace ergo
