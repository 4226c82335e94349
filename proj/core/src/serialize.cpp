#include "ergo/serialize.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "ergo/errors.hpp"

namespace ergo {
namespace {

std::size_t readCount(std::istream& in) {
  long long n = -1;
  if (!(in >> n) || n < 0) fail(ErrorKind::Precondition, "BadFormat", "missing or negative piece count");
  return static_cast<std::size_t>(n);
}

Rational readValue(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) fail(ErrorKind::Precondition, "BadFormat", "truncated piece line");
  return parseRational(tok);
}

}  // namespace

void writeSet(std::ostream& out, const IntervalSet& s) {
  out << s.size() << '\n';
  for (const auto& iv : s.pieces()) out << formatRational(iv.lo) << ' ' << formatRational(iv.hi) << '\n';
}

void writeTranslation(std::ostream& out, const PiecewiseTranslation& t) {
  out << t.size() << '\n';
  for (const auto& p : t.pieces())
    out << formatRational(p.source.lo) << ' ' << formatRational(p.source.hi) << ' ' << formatRational(p.offset)
        << '\n';
}

IntervalSet readSet(std::istream& in) {
  const std::size_t n = readCount(in);
  std::vector<Interval> pieces;
  pieces.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational lo = readValue(in);
    Rational hi = readValue(in);
    require(lo < hi, "interval with lo >= hi");
    pieces.emplace_back(std::move(lo), std::move(hi));
  }
  return IntervalSet::fromPieces(std::move(pieces));
}

PiecewiseTranslation readTranslation(std::istream& in) {
  const std::size_t n = readCount(in);
  std::vector<TranslationPiece> pieces;
  pieces.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational lo = readValue(in);
    Rational hi = readValue(in);
    Rational off = readValue(in);
    require(lo < hi, "interval with lo >= hi");
    pieces.push_back({Interval(std::move(lo), std::move(hi)), std::move(off)});
  }
  return PiecewiseTranslation::fromPieces(std::move(pieces));
}

std::string toText(const IntervalSet& s) {
  std::ostringstream os;
  writeSet(os, s);
  return os.str();
}

std::string toText(const PiecewiseTranslation& t) {
  std::ostringstream os;
  writeTranslation(os, t);
  return os.str();
}

IntervalSet parseSetSpec(std::string_view spec) {
  std::vector<Interval> pieces;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const std::string_view item = spec.substr(0, comma);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos)
      fail(ErrorKind::Precondition, "BadSet", "expected lo:hi, got '" + std::string(item) + "'");
    Rational lo = parseRational(item.substr(0, colon));
    Rational hi = parseRational(item.substr(colon + 1));
    require(lo < hi && lo >= 0 && hi <= 1, "set interval must satisfy 0 <= lo < hi <= 1");
    pieces.emplace_back(std::move(lo), std::move(hi));
    if (comma == std::string_view::npos) break;
    spec.remove_prefix(comma + 1);
  }
  return IntervalSet::fromPieces(std::move(pieces));
}

std::string formatSetSpec(const IntervalSet& s) {
  std::string out;
  for (const auto& iv : s.pieces()) {
    if (!out.empty()) out += ',';
    out += formatRational(iv.lo) + ':' + formatRational(iv.hi);
  }
  return out;
}

}  // namespace ergo
