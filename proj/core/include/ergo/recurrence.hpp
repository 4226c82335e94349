#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ergo/piecewise.hpp"

namespace ergo {

/// Exact bounds on μ(TⁿA ∩ B) at a finite stage. When blocked == 0 the
/// value is exact and lower == upper.
struct CorrelationBounds {
  Rational lower;
  Rational upper;
  Rational blocked;  // mass of A whose n-th image left the defined part

  bool exact() const { return blocked == 0; }
};

/// μ(TⁿA ∩ B). Throws PartiallyUndefinedError carrying the bounds when the
/// stage cannot resolve it.
Rational correlation(const PiecewiseTranslation& t, const IntervalSet& A, const IntervalSet& B, long long n);
CorrelationBounds correlationBounds(const PiecewiseTranslation& t, const IntervalSet& A, const IntervalSet& B,
                                    long long n);

struct CorrelationTable {
  IntervalSet A, B;
  long long horizon = 0;
  std::map<long long, Rational> values;               // exact entries
  std::map<long long, CorrelationBounds> undefinedNs;  // blocked entries with bounds

  CorrelationBounds at(long long n) const;
  /// Columns n,num,den,muA2_num,muA2_den,margin_num,margin_den; margin is
  /// value − μ(A)μ(B). Exact rows only.
  void writeCsv(std::ostream& out) const;
};

/// All n in [-horizon, horizon], computed by stepping T and T⁻¹.
CorrelationTable correlationTable(const PiecewiseTranslation& t, const IntervalSet& A, const IntervalSet& B,
                                  long long horizon);

enum class VerdictKind {
  StrictlyOverRecurrent,
  OverRecurrent,
  EpsOverRecurrent,
  StrictlyUnderRecurrent,
  UnderRecurrent,
  EpsUnderRecurrent,
  None,
};

struct RecurrenceVerdict {
  VerdictKind kind = VerdictKind::None;
  long long horizon = 0;
  std::optional<Rational> eps;
  Rational margin;                 // worst slack of the reported variant
  std::optional<long long> witness;  // violating n when kind == None

  std::string name() const;
};

/// Finite-horizon classification. Over variants check 0 < |n| <= horizon,
/// under variants check 1 <= n <= horizon. Blocked n are judged by their
/// exact bounds; if nothing is certified and something is undecided,
/// PartiallyUndefinedError is raised for the first undecided n.
RecurrenceVerdict classify(const PiecewiseTranslation& t, const IntervalSet& A, long long horizon,
                           const std::optional<Rational>& eps = std::nullopt);
RecurrenceVerdict classify(const CorrelationTable& table, const std::optional<Rational>& eps = std::nullopt);

/// Smallest N with α/N < ε.
long long requiredN(const Rational& alpha, const Rational& eps);

struct PairResult {
  std::size_t j = 0, k = 0;  // 1-based, j < k
  Rational value;
  Rational average;  // mean of μ(A_i ∩ A_l) over ordered pairs i != l
  bool boundMet = true;
};

/// Maximizing pair of a family with common measure α. boundMet is false when
/// the family is shorter than requiredN(α, ε).
PairResult lemmaPairSearch(const std::vector<IntervalSet>& sets, const Rational& eps);

/// (1/h) Σ_{i<h} μ(TⁱA ∩ A).
Rational meanErgodicAverage(const PiecewiseTranslation& t, const IntervalSet& A, long long h);

/// Smallest n in [lo, hi] with μ(TⁿA ∩ A) < μ(A)² certified by the upper bound.
/// Undecided n are skipped; PartiallyUndefined only when none is certified and
/// some n could not be ruled out.
std::optional<long long> underRecurrenceWitness(const PiecewiseTranslation& t, const IntervalSet& A, long long lo,
                                                long long hi);

}  // namespace ergo
