#include "ergo/builders.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ergo/errors.hpp"

namespace ergo {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

long long parseInt(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    fail(ErrorKind::Precondition, "BadRecipe", "not an integer: '" + std::string(s) + "'");
  return v;
}

long long mulChecked(long long a, long long b) {
  long long r = 0;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrorKind::StageExhausted, "StageTooLarge", "column height overflows");
  return r;
}

long long addChecked(long long a, long long b) {
  long long r = 0;
  if (__builtin_add_overflow(a, b, &r)) fail(ErrorKind::StageExhausted, "StageTooLarge", "column height overflows");
  return r;
}

}  // namespace

RecipeExpr RecipeExpr::parse(std::string_view text) {
  RecipeExpr e;
  text = trim(text);
  e.text_ = std::string(text);
  if (text.empty()) fail(ErrorKind::Precondition, "BadRecipe", "empty expression");
  if (text.front() == '[') {
    if (text.back() != ']') fail(ErrorKind::Precondition, "BadRecipe", "unterminated list '" + e.text_ + "'");
    e.var_ = Var::List;
    std::string_view body = text.substr(1, text.size() - 2);
    while (true) {
      const auto comma = body.find(',');
      e.list_.push_back(parseInt(body.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    return e;
  }
  if (text.front() == 'n' || text.front() == 'j') {
    e.var_ = text.front() == 'n' ? Var::N : Var::J;
    std::string_view rest = trim(text.substr(1));
    if (!rest.empty()) {
      if (rest.front() != '+' && rest.front() != '-')
        fail(ErrorKind::Precondition, "BadRecipe", "expected n+c or j+c, got '" + e.text_ + "'");
      const bool neg = rest.front() == '-';
      e.c_ = parseInt(rest.substr(1));
      if (neg) e.c_ = -e.c_;
    }
    return e;
  }
  e.c_ = parseInt(text);
  return e;
}

RecipeExpr RecipeExpr::constant(long long c) {
  RecipeExpr e;
  e.c_ = c;
  e.text_ = std::to_string(c);
  return e;
}

long long RecipeExpr::eval(long long n, long long j) const {
  switch (var_) {
    case Var::None: return c_;
    case Var::N: return n + c_;
    case Var::J: return j + c_;
    case Var::List: return list_[std::min<std::size_t>(static_cast<std::size_t>(j), list_.size() - 1)];
  }
  return c_;
}

long long Recipe::cutsAt(long long step) const {
  const long long c = cuts.eval(step, 0);
  if (c < 2) fail(ErrorKind::Precondition, "BadRecipe", name + ": cuts must be at least 2");
  return c;
}

long long Recipe::spacersAt(long long step, long long j) const {
  const long long s = spacers.eval(step, j);
  if (s < 0) fail(ErrorKind::Precondition, "BadRecipe", name + ": negative spacer count");
  return s;
}

std::optional<Recipe> builtinRecipe(std::string_view name) {
  Recipe r;
  r.name = std::string(name);
  if (name == "odometer") {
    r.rigid = true;
    return r;
  }
  if (name == "staircase") {
    r.cuts = RecipeExpr::parse("n+1");
    r.spacers = RecipeExpr::parse("j");
    return r;
  }
  if (name == "chacon") {
    r.cuts = RecipeExpr::constant(3);
    r.spacers = RecipeExpr::parse("[0,1,0]");
    return r;
  }
  if (name == "identity" || name.rfind("rotation", 0) == 0) {
    r.kind = Recipe::Kind::Rotation;
    r.rigid = true;
    r.wrap = true;
    if (name != "identity") {
      r.period = parseInt(name.substr(8));
      if (r.period < 1) fail(ErrorKind::Precondition, "BadRecipe", "rotation period must be positive");
    }
    return r;
  }
  return std::nullopt;
}

Recipe parseRecipe(std::string_view text) {
  Recipe r;
  bool first = true;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      if (!first) fail(ErrorKind::Precondition, "BadRecipe", "expected key: value, got '" + std::string(line) + "'");
      r.name = std::string(line);
      first = false;
      continue;
    }
    first = false;
    const std::string_view key = trim(line.substr(0, colon));
    const std::string_view value = trim(line.substr(colon + 1));
    if (key == "name") r.name = std::string(value);
    else if (key == "cuts") r.cuts = RecipeExpr::parse(value);
    else if (key == "spacers") r.spacers = RecipeExpr::parse(value);
    else if (key == "rigid") r.rigid = value == "yes" || value == "true";
    else if (key == "close") {
      if (value != "wrap" && value != "top") fail(ErrorKind::Precondition, "BadRecipe", "close must be wrap or top");
      r.wrap = value == "wrap";
    } else
      fail(ErrorKind::Precondition, "BadRecipe", "unknown key '" + std::string(key) + "'");
  }
  if (r.name.empty()) fail(ErrorKind::Precondition, "BadRecipe", "recipe has no name");
  return r;
}

Recipe loadRecipe(const std::string& nameOrPath) {
  if (auto r = builtinRecipe(nameOrPath)) return *r;
  std::ifstream in(nameOrPath);
  if (!in) fail(ErrorKind::Precondition, "BadRecipe", "unknown recipe or unreadable file: " + nameOrPath);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseRecipe(ss.str());
}

std::vector<long long> stageHeights(const Recipe& r, int stage) {
  require(stage >= 0, "stage must be non-negative");
  if (r.kind == Recipe::Kind::Rotation) return {r.period};
  std::vector<long long> h{1};
  for (int k = 1; k <= stage; ++k) {
    const long long c = r.cutsAt(k);
    long long next = mulChecked(c, h.back());
    for (long long j = 0; j < c; ++j) next = addChecked(next, r.spacersAt(k, j));
    h.push_back(next);
  }
  return h;
}

IntervalSet StagedTransformation::level(long long i) const {
  return IntervalSet::interval(levelLo.at(static_cast<std::size_t>(i)), levelLo[static_cast<std::size_t>(i)] + width);
}

IntervalSet StagedTransformation::levelRange(long long from, long long to) const {
  std::vector<Interval> pieces;
  for (long long i = from; i < to; ++i) {
    const auto& lo = levelLo.at(static_cast<std::size_t>(i));
    pieces.emplace_back(lo, lo + width);
  }
  return IntervalSet::fromPieces(std::move(pieces));
}

Tower StagedTransformation::column() const {
  Tower t;
  t.height = height();
  t.base = level(0);
  t.levels.reserve(levelLo.size());
  for (long long i = 0; i < height(); ++i) t.levels.push_back(level(i));
  return t;
}

StagedTransformation buildStage(const Recipe& r, int stage, const BuildOptions& opts) {
  require(stage >= 1 || r.kind == Recipe::Kind::Rotation, "stage must be at least 1");
  StagedTransformation st;
  st.recipe = r;
  st.stage = stage;

  if (r.kind == Recipe::Kind::Rotation) {
    st.heights = {r.period};
    st.width = makeRational(1, r.period);
    for (long long i = 0; i < r.period; ++i) st.levelLo.push_back(makeRational(i, r.period));
  } else {
    const int normStage = opts.normalizeAt.value_or(stage);
    require(normStage >= stage, "normalization stage must not precede the built stage");
    const auto normHeights = stageHeights(r, normStage);
    if (normHeights.back() > opts.pieceBudget)
      fail(ErrorKind::StageExhausted, "StageTooLarge",
           r.name + " stage " + std::to_string(normStage) + " has height " + std::to_string(normHeights.back()) +
               " above the piece budget " + std::to_string(opts.pieceBudget));
    st.heights.assign(normHeights.begin(), normHeights.begin() + stage + 1);

    Integer cutProduct = 1;
    for (int k = 1; k <= normStage; ++k) cutProduct *= toInteger(r.cutsAt(k));
    Rational w(cutProduct, toInteger(normHeights.back()));
    w.canonicalize();
    Rational reserve = w;  // spacers are carved from [w0, 1) left to right
    st.levelLo = {Rational(0)};
    for (int k = 1; k <= stage; ++k) {
      const long long c = r.cutsAt(k);
      Rational nw = w / fromInt(c);
      std::vector<Rational> next;
      next.reserve(static_cast<std::size_t>(st.heights[static_cast<std::size_t>(k)]));
      for (long long j = 0; j < c; ++j) {
        const Rational shift = nw * fromInt(j);
        for (const auto& lo : st.levelLo) next.push_back(lo + shift);
        for (long long s = r.spacersAt(k, j); s > 0; --s) {
          next.push_back(reserve);
          reserve += nw;
        }
      }
      st.levelLo = std::move(next);
      w = std::move(nw);
    }
    st.width = w;
  }

  std::vector<TranslationPiece> pieces;
  const std::size_t h = st.levelLo.size();
  pieces.reserve(h);
  for (std::size_t i = 0; i + 1 < h; ++i)
    pieces.push_back({Interval(st.levelLo[i], st.levelLo[i] + st.width), st.levelLo[i + 1] - st.levelLo[i]});
  if (r.wrap)
    pieces.push_back({Interval(st.levelLo[h - 1], st.levelLo[h - 1] + st.width), st.levelLo[0] - st.levelLo[h - 1]});
  st.map = PiecewiseTranslation::fromPieces(std::move(pieces));
  return st;
}

std::vector<long long> rigiditySequence(const Recipe& r, int count) {
  require(count >= 0, "count must be non-negative");
  if (!r.rigid) fail(ErrorKind::Precondition, "NotRigid", r.name + " is not a rigidity-producing recipe");
  std::vector<long long> out;
  if (r.kind == Recipe::Kind::Rotation) {
    for (int k = 1; k <= count; ++k) out.push_back(mulChecked(r.period, k));
    return out;
  }
  const auto h = stageHeights(r, count);
  out.assign(h.begin() + 1, h.end());
  return out;
}

}  // namespace ergo
