#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ergo/builders.hpp"
#include "ergo/recurrence.hpp"
#include "ergo/towers.hpp"

namespace ergo {

/// ε_j = q/(2(1+q)) with q = (j(1−2a)+(1−4a))/((j+1)(j+2)); the strict
/// inequality (1−ε_j)(1+q) > 1 is re-checked before returning.
Rational chooseEpsilon(long long j, const Rational& a);

/// a_i = a/(i(i+1)).
Rational budgetPart(long long i, const Rational& a);

struct MixingScale {
  long long N = 0;
  long long verifiedUpTo = 0;  // every N <= |n| <= verifiedUpTo was checked
  Rational worstRelativeError;  // max |μ(TⁿC∩C) − μ(C)²| / μ(C)² over the window
};

/// Smallest N >= minN with |μ(TⁿC∩C) − μ(C)²| < ε μ(C)² certified for all
/// N <= |n| <= N·window. Raises NotFoundWithinStage when the stage's reach
/// (or maxScan) ends first.
MixingScale detectMixingScale(const PiecewiseTranslation& t, const IntervalSet& C, const Rational& eps,
                              long long window, long long minN = 1, long long maxScan = 1'000'000);

struct OverRecStep {
  long long k = 0;
  Rational eps;
  MixingScale scale;
  long long m = 0;
  long long towerHeight = 0;
  Rational towerCoverage;
  IntervalSet base;     // B_k
  IntervalSet subset;   // I_k
  IntervalSet part;     // A_{k+1}
  Rational stepMargin;  // min over |i| < N_k of μ(TⁱA_{k+1} ∩ A) − (1−ε_k)μ(A_{k+1})
};

struct OverRecState {
  Rational a;
  long long K = 0;
  long long window = 4;
  std::vector<Rational> budget;     // a_1..a_{K+1}
  std::vector<IntervalSet> parts;   // A_1..A_{K+1}
  std::vector<OverRecStep> steps;   // k = 1..K
  IntervalSet A;

  Rational measure() const { return A.measure(); }
  IntervalSet C(long long k) const;  // A_1 ∪ ... ∪ A_k
};

struct OverRecOptions {
  long long window = 4;
  long long maxScan = 1'000'000;
};

struct OverRecResult {
  OverRecState state;
  RecurrenceVerdict verdict;  // horizon N_K − 1; for K = 0 horizon 1 and not enforced
};

/// Truncated inductive construction with K steps. Propagates
/// NotFoundWithinStage / CoverageUnattainable (message carries k).
OverRecResult buildStrictlyOverRecurrentSet(const StagedTransformation& t, const Rational& a, long long K,
                                            const OverRecOptions& opts = {});

struct BranchBound {
  Rational lhs, mid, rhs;  // lhs > mid > rhs must hold
  bool holds() const { return lhs > mid && mid > rhs; }
};

struct MarginReport {
  BranchBound nearBranch;             // (1/2)(1−ε_1)a > (1/3 + a/2)a > a²
  std::vector<BranchBound> kBranches;  // displayed chain per k, rhs = a²
  long long checkedNs = 0;            // exact decompositions evaluated
  Rational worstSlack;                // min over checked n of μ(TⁿA∩A) − μ(A)²
};

/// The near-branch bound needs only a and ε_1.
BranchBound nearBranchBound(const Rational& a, const Rational& eps1);
/// (1−ε_k)((a − a/(k+1))² + a/(k+2)) > (1−ε_k)a²(1 + (k(1−2a)+1−4a)/(a(k+1)(k+2))) > a².
BranchBound kBranchBound(long long k, const Rational& a, const Rational& epsK);

/// Symbolic chains plus exact three-part decompositions on the verified
/// windows. Raises MarginViolated with the witness n.
MarginReport verifyOverRecMargins(const OverRecState& state, const StagedTransformation& t);

struct TransferPlan {
  const StagedTransformation* source = nullptr;
  const StagedTransformation* target = nullptr;
  IntervalSet A;
  long long h = 0;
  Rational eps;
};

struct TransferResult {
  IntervalSet J, K;
  std::vector<long long> levels;  // tower level indices making up J (and K)
  Rational symmetricDifference;   // μ(A △ J)
  Rational sourceResidual, targetResidual;
  RecurrenceVerdict verdict;      // horizon h − 1
};

/// Copies the majority-rule level pattern of A in the source tower to the
/// target tower of the same height. Raises ToleranceUnmet when the
/// approximation or residual thresholds fail or h = 1.
TransferResult transferEpsOverRecurrent(const TransferPlan& plan);

}  // namespace ergo
