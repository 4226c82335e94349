#include "ergo/recurrence.hpp"

#include <algorithm>
#include <ostream>

#include "ergo/errors.hpp"

namespace ergo {
namespace {

CorrelationBounds boundsFor(const IntervalSet& cur, const IntervalSet& B, const Rational& blocked,
                            const Rational& cap) {
  CorrelationBounds b;
  b.lower = intersectionMeasure(cur, B);
  b.blocked = blocked;
  b.upper = b.lower + blocked;
  if (b.upper > cap) b.upper = cap;
  return b;
}

// Steps A forward (or backward) and reports bounds after every step.
template <typename OnStep>
void walk(const PiecewiseTranslation& step, const IntervalSet& A, const IntervalSet& B, long long count,
          OnStep&& on) {
  const Rational cap = std::min(A.measure(), B.measure());
  IntervalSet cur = A;
  Rational blocked = 0;
  for (long long i = 1; i <= count; ++i) {
    auto r = step.imagePartial(cur);
    blocked += r.blocked.measure();
    cur = std::move(r.image);
    on(i, boundsFor(cur, B, blocked, cap));
  }
}

[[noreturn]] void throwUndefined(long long n, const CorrelationBounds& b) {
  throw PartiallyUndefinedError("correlation at n=" + std::to_string(n) + " meets the undefined residual (blocked " +
                                    formatRational(b.blocked) + ")",
                                b.blocked, n, b.lower, b.upper);
}

enum class Status { Holds, Undecided, Fails };

}  // namespace

CorrelationBounds correlationBounds(const PiecewiseTranslation& t, const IntervalSet& A, const IntervalSet& B,
                                    long long n) {
  if (n == 0) {
    const Rational v = intersectionMeasure(A, B);
    return {v, v, Rational(0)};
  }
  CorrelationBounds out;
  const PiecewiseTranslation step = n > 0 ? t : t.inverse();
  walk(step, A, B, n > 0 ? n : -n, [&](long long, const CorrelationBounds& b) { out = b; });
  return out;
}

Rational correlation(const PiecewiseTranslation& t, const IntervalSet& A, const IntervalSet& B, long long n) {
  auto b = correlationBounds(t, A, B, n);
  if (!b.exact()) throwUndefined(n, b);
  return b.lower;
}

CorrelationBounds CorrelationTable::at(long long n) const {
  if (auto it = values.find(n); it != values.end()) return {it->second, it->second, Rational(0)};
  if (auto it = undefinedNs.find(n); it != undefinedNs.end()) return it->second;
  fail(ErrorKind::Precondition, "OutOfHorizon", "n=" + std::to_string(n) + " is outside the table horizon");
}

void CorrelationTable::writeCsv(std::ostream& out) const {
  const Rational ref = A.measure() * B.measure();
  out << "n,num,den,muA2_num,muA2_den,margin_num,margin_den\n";
  for (const auto& [n, v] : values) {
    const Rational margin = v - ref;
    out << n << ',' << v.get_num().get_str() << ',' << v.get_den().get_str() << ',' << ref.get_num().get_str() << ','
        << ref.get_den().get_str() << ',' << margin.get_num().get_str() << ',' << margin.get_den().get_str() << '\n';
  }
}

CorrelationTable correlationTable(const PiecewiseTranslation& t, const IntervalSet& A, const IntervalSet& B,
                                  long long horizon) {
  require(horizon >= 0, "horizon must be non-negative");
  CorrelationTable table;
  table.A = A;
  table.B = B;
  table.horizon = horizon;
  table.values[0] = intersectionMeasure(A, B);
  auto record = [&](long long n, const CorrelationBounds& b) {
    if (b.exact())
      table.values[n] = b.lower;
    else
      table.undefinedNs[n] = b;
  };
  walk(t, A, B, horizon, [&](long long i, const CorrelationBounds& b) { record(i, b); });
  walk(t.inverse(), A, B, horizon, [&](long long i, const CorrelationBounds& b) { record(-i, b); });
  return table;
}

std::string RecurrenceVerdict::name() const {
  switch (kind) {
    case VerdictKind::StrictlyOverRecurrent: return "strictlyOverRecurrent";
    case VerdictKind::OverRecurrent: return "overRecurrent";
    case VerdictKind::EpsOverRecurrent: return "epsOverRecurrent(" + formatRational(*eps) + ")";
    case VerdictKind::StrictlyUnderRecurrent: return "strictlyUnderRecurrent";
    case VerdictKind::UnderRecurrent: return "underRecurrent";
    case VerdictKind::EpsUnderRecurrent: return "epsUnderRecurrent(" + formatRational(*eps) + ")";
    case VerdictKind::None: return "none";
  }
  return "none";
}

RecurrenceVerdict classify(const CorrelationTable& table, const std::optional<Rational>& eps) {
  require(table.A == table.B, "classification needs A = B");
  const Rational mu = table.A.measure();
  require(mu > 0 && mu < 1, "classification needs 0 < μ(A) < 1");
  require(table.horizon >= 1, "horizon must be at least 1");
  if (eps) require(*eps > 0, "ε must be positive");
  const Rational mu2 = mu * mu;
  const long long H = table.horizon;

  struct Variant {
    VerdictKind kind;
    bool over;
    bool strict;
    Rational threshold;
    Status status = Status::Holds;
    Rational margin;
    bool seen = false;
    long long firstUndecided = 0;
    long long firstFail = 0;
  };
  std::vector<Variant> variants{
      {VerdictKind::StrictlyOverRecurrent, true, true, mu2},
      {VerdictKind::OverRecurrent, true, false, mu2},
  };
  if (eps) variants.push_back({VerdictKind::EpsOverRecurrent, true, true, (1 - *eps) * mu2});
  variants.push_back({VerdictKind::StrictlyUnderRecurrent, false, true, mu2});
  variants.push_back({VerdictKind::UnderRecurrent, false, false, mu2});
  if (eps) variants.push_back({VerdictKind::EpsUnderRecurrent, false, true, (1 + *eps) * mu2});

  // Visit n in the order 1, -1, 2, -2, ... so "first" means smallest |n|.
  for (long long m = 1; m <= H; ++m) {
    for (long long n : {m, -m}) {
      const CorrelationBounds b = table.at(n);
      for (auto& v : variants) {
        if (!v.over && n < 0) continue;
        // Slack certified by the bounds, and the best slack still possible.
        const Rational worst = v.over ? b.lower - v.threshold : v.threshold - b.upper;
        const Rational best = v.over ? b.upper - v.threshold : v.threshold - b.lower;
        if (!v.seen || worst < v.margin) v.margin = worst;
        v.seen = true;
        const bool holds = v.strict ? worst > 0 : worst >= 0;
        const bool fails = v.strict ? best <= 0 : best < 0;
        if (fails) {
          if (v.status != Status::Fails) v.firstFail = n;
          v.status = Status::Fails;
        } else if (!holds && v.status == Status::Holds) {
          v.status = Status::Undecided;
          v.firstUndecided = n;
        }
      }
    }
  }

  RecurrenceVerdict verdict;
  verdict.horizon = H;
  verdict.eps = eps;
  for (const auto& v : variants) {
    if (v.status == Status::Holds) {
      verdict.kind = v.kind;
      verdict.margin = v.margin;
      return verdict;
    }
  }
  for (const auto& v : variants) {
    if (v.status == Status::Undecided) {
      const CorrelationBounds b = table.at(v.firstUndecided);
      throwUndefined(v.firstUndecided, b);
    }
  }
  // Nothing holds: report the weakest over variant's violation.
  const Variant& weakestOver = eps ? variants[2] : variants[1];
  verdict.kind = VerdictKind::None;
  verdict.margin = weakestOver.margin;
  verdict.witness = weakestOver.firstFail;
  return verdict;
}

RecurrenceVerdict classify(const PiecewiseTranslation& t, const IntervalSet& A, long long horizon,
                           const std::optional<Rational>& eps) {
  require(horizon >= 1, "horizon must be at least 1");
  return classify(correlationTable(t, A, A, horizon), eps);
}

long long requiredN(const Rational& alpha, const Rational& eps) {
  require(alpha > 0 && eps > 0, "α and ε must be positive");
  return floorToInt(alpha / eps) + 1;
}

PairResult lemmaPairSearch(const std::vector<IntervalSet>& sets, const Rational& eps) {
  require(sets.size() >= 2, "pair search needs at least two sets");
  const Rational alpha = sets.front().measure();
  require(alpha > 0 && alpha <= 1, "common measure must lie in (0,1]");
  for (const auto& s : sets) require(s.measure() == alpha, "all sets must share one measure");
  PairResult best;
  Rational total = 0;
  bool first = true;
  for (std::size_t j = 0; j < sets.size(); ++j) {
    for (std::size_t k = j + 1; k < sets.size(); ++k) {
      Rational v = intersectionMeasure(sets[j], sets[k]);
      total += v;
      if (first || v > best.value) {
        best.j = j + 1;
        best.k = k + 1;
        best.value = v;
        first = false;
      }
    }
  }
  const long long n = static_cast<long long>(sets.size());
  best.average = 2 * total / fromInt(n * (n - 1));
  best.boundMet = n >= requiredN(alpha, eps);
  return best;
}

Rational meanErgodicAverage(const PiecewiseTranslation& t, const IntervalSet& A, long long h) {
  require(h >= 1, "averaging length must be at least 1");
  Rational sum = A.measure();
  walk(t, A, A, h - 1, [&](long long i, const CorrelationBounds& b) {
    if (!b.exact()) throwUndefined(i, b);
    sum += b.lower;
  });
  return sum / fromInt(h);
}

std::optional<long long> underRecurrenceWitness(const PiecewiseTranslation& t, const IntervalSet& A, long long lo,
                                                long long hi) {
  const Rational mu = A.measure();
  require(mu > 0 && mu < 1, "witness search needs 0 < μ(A) < 1");
  require(lo >= 1 && lo <= hi, "range must satisfy 1 <= lo <= hi");
  const Rational mu2 = mu * mu;
  // Walked by hand so the search can stop at the first witness.
  IntervalSet cur = A;
  Rational blocked = 0;
  std::optional<std::pair<long long, CorrelationBounds>> undecided;
  for (long long n = 1; n <= hi; ++n) {
    auto r = t.imagePartial(cur);
    blocked += r.blocked.measure();
    cur = std::move(r.image);
    if (n < lo) continue;
    const CorrelationBounds b = boundsFor(cur, A, blocked, mu);
    if (b.upper < mu2) return n;
    if (b.lower < mu2 && !undecided) undecided.emplace(n, b);
  }
  // Absence is only claimed when every n in range was decided.
  if (undecided) throwUndefined(undecided->first, undecided->second);
  return std::nullopt;
}

}  // namespace ergo
