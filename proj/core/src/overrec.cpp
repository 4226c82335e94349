#include "ergo/overrec.hpp"

#include <algorithm>

#include "ergo/errors.hpp"

namespace ergo {
namespace {

std::string stepTag(long long k) { return "step k=" + std::to_string(k) + ": "; }

enum class Fit { Inside, Outside, Undecided };

Fit judge(const CorrelationBounds& b, const Rational& mu2, const Rational& tol) {
  if (b.lower > mu2 - tol && b.upper < mu2 + tol) return Fit::Inside;
  if (b.upper <= mu2 - tol || b.lower >= mu2 + tol) return Fit::Outside;
  return Fit::Undecided;
}

Rational exactAt(const CorrelationTable& table, long long n) {
  const CorrelationBounds b = table.at(n);
  if (!b.exact())
    throw PartiallyUndefinedError("decomposition at n=" + std::to_string(n) + " meets the undefined residual",
                                  b.blocked, n, b.lower, b.upper);
  return b.lower;
}

}  // namespace

Rational chooseEpsilon(long long j, const Rational& a) {
  require(j >= 1, "j must be at least 1");
  require(a > 0 && a < Rational(1, 4), "a must lie in (0, 1/4)");
  const Rational J = fromInt(j);
  const Rational q = (J * (1 - 2 * a) + (1 - 4 * a)) / ((J + 1) * (J + 2));
  Rational eps = q / (2 * (1 + q));
  if (!((1 - eps) * (1 + q) > 1)) fail(ErrorKind::Verification, "MarginViolated", "ε_j fails the defining inequality");
  return eps;
}

Rational budgetPart(long long i, const Rational& a) {
  require(i >= 1, "budget index must be at least 1");
  return a / fromInt(i * (i + 1));
}

MixingScale detectMixingScale(const PiecewiseTranslation& t, const IntervalSet& C, const Rational& eps,
                              long long window, long long minN, long long maxScan) {
  const Rational mu = C.measure();
  require(mu > 0 && mu < 1, "mixing scale needs 0 < μ(C) < 1");
  require(eps > 0, "ε must be positive");
  require(window >= 1, "window must be at least 1");
  require(minN >= 1, "minimum N must be at least 1");
  const Rational mu2 = mu * mu;
  const Rational tol = eps * mu2;
  const PiecewiseTranslation back = t.inverse();

  IntervalSet fwd = C, bwd = C;
  Rational fwdBlocked = 0, bwdBlocked = 0;
  long long N = minN;
  std::vector<Rational> errs;  // relative error per |n|, index n - 1
  for (long long n = 1; n <= maxScan; ++n) {
    auto f = t.imagePartial(fwd);
    fwdBlocked += f.blocked.measure();
    fwd = std::move(f.image);
    auto b = back.imagePartial(bwd);
    bwdBlocked += b.blocked.measure();
    bwd = std::move(b.image);

    Fit verdict = Fit::Inside;
    Rational err = 0;
    for (const auto* side : {&fwd, &bwd}) {
      const Rational& blocked = side == &fwd ? fwdBlocked : bwdBlocked;
      CorrelationBounds cb;
      cb.lower = intersectionMeasure(*side, C);
      cb.blocked = blocked;
      cb.upper = cb.lower + blocked;
      if (cb.upper > mu) cb.upper = mu;
      const Fit fit = judge(cb, mu2, tol);
      if (fit == Fit::Outside) verdict = Fit::Outside;
      else if (fit == Fit::Undecided && verdict == Fit::Inside) verdict = Fit::Undecided;
      Rational e = abs(cb.lower - mu2);
      if (Rational e2 = abs(cb.upper - mu2); e2 > e) e = e2;
      if (e > err) err = e;
    }
    errs.push_back(err / mu2);
    const Rational& blockedMax = fwdBlocked > bwdBlocked ? fwdBlocked : bwdBlocked;
    if (blockedMax >= 2 * tol)
      fail(ErrorKind::StageExhausted, "NotFoundWithinStage",
           "at |n| = " + std::to_string(n) + " the blocked mass " + formatRational(blockedMax) +
               " reaches 2εμ(C)², so no later n can be certified; last candidate N=" + std::to_string(N) +
               " needed [" + std::to_string(N) + ", " + std::to_string(N * window) + "]");
    if (verdict != Fit::Inside && n >= N) N = n + 1;
    if (n >= N * window) {
      MixingScale out;
      out.N = N;
      out.verifiedUpTo = N * window;
      out.worstRelativeError = *std::max_element(errs.begin() + (N - 1), errs.begin() + (N * window));
      return out;
    }
  }
  fail(ErrorKind::StageExhausted, "NotFoundWithinStage",
       "no mixing scale with |n| <= " + std::to_string(maxScan) + " (last candidate N=" + std::to_string(N) + ")");
}

IntervalSet OverRecState::C(long long k) const {
  return unionAll(std::span<const IntervalSet>(parts.data(), static_cast<std::size_t>(k)));
}

OverRecResult buildStrictlyOverRecurrentSet(const StagedTransformation& t, const Rational& a, long long K,
                                            const OverRecOptions& opts) {
  require(a > 0 && a < Rational(1, 4), "a must lie in (0, 1/4)");
  require(K >= 0, "stage count must be non-negative");
  OverRecResult res;
  OverRecState& st = res.state;
  st.a = a;
  st.K = K;
  st.window = opts.window;
  for (long long i = 1; i <= K + 1; ++i) st.budget.push_back(budgetPart(i, a));
  st.parts.push_back(IntervalSet::interval(0, a / 2));

  long long prevN = 0;
  for (long long k = 1; k <= K; ++k) {
    OverRecStep step;
    step.k = k;
    step.eps = chooseEpsilon(k, a);
    const IntervalSet Ck = st.C(k);
    try {
      step.scale = detectMixingScale(t.map, Ck, step.eps, opts.window, prevN + 1, opts.maxScan);
    } catch (const Error& e) {
      fail(e.kind(), e.name(), stepTag(k) + e.detail());
    }
    const long long N = step.scale.N;
    prevN = N;
    const Rational& target = st.budget[static_cast<std::size_t>(k)];
    std::optional<Tower> tower;
    for (long long m = floorToInt(1 / step.eps) + 1;; m *= 2) {
      if (m * N > t.height())
        fail(ErrorKind::StageExhausted, "CoverageUnattainable",
             stepTag(k) + "tower height " + std::to_string(m * N) + " exceeds the column height " +
                 std::to_string(t.height()));
      Tower cand;
      try {
        cand = extractTower(t, m * N, 1 - step.eps);
      } catch (const Error&) {
        continue;
      }
      if (sweepSet(cand, t.map, cand.base, Ck).measure() >= target) {
        step.m = m;
        tower = std::move(cand);
        break;
      }
    }
    step.towerHeight = tower->height;
    step.towerCoverage = tower->coverage();
    step.base = tower->base;
    step.subset = selectBaseSubset(*tower, t.map, Ck, target);
    step.part = sweepSet(*tower, t.map, step.subset, Ck);
    if (step.part.measure() != target)
      fail(ErrorKind::Verification, "MarginViolated", stepTag(k) + "swept part misses its budget");
    st.parts.push_back(step.part);
    st.steps.push_back(std::move(step));
  }
  st.A = unionAll(st.parts);

  Rational total = 0;
  for (const auto& p : st.parts) total += p.measure();
  if (total != st.A.measure())
    fail(ErrorKind::Verification, "MarginViolated", "constructed parts are not pairwise disjoint");

  // Per-step guarantee, recomputed from scratch on the finished set.
  for (auto& step : st.steps) {
    const IntervalSet& part = step.part;
    const Rational need = (1 - step.eps) * part.measure();
    const long long N = step.scale.N;
    const auto table = correlationTable(t.map, part, st.A, N - 1);
    bool first = true;
    for (long long i = -(N - 1); i <= N - 1; ++i) {
      const Rational slack = exactAt(table, i) - need;
      if (first || slack < step.stepMargin) step.stepMargin = slack;
      first = false;
      if (slack <= 0)
        fail(ErrorKind::Verification, "MarginViolated",
             stepTag(step.k) + "sweep guarantee fails at i=" + std::to_string(i));
    }
  }

  // With no step there is no certified window, so the K = 0 verdict is reported as found.
  const long long horizon = K == 0 ? 1 : st.steps.back().scale.N - 1;
  res.verdict = classify(t.map, st.A, std::max<long long>(horizon, 1));
  if (K > 0 && res.verdict.kind != VerdictKind::StrictlyOverRecurrent)
    fail(ErrorKind::Verification, "MarginViolated",
         "final set is " + res.verdict.name() + " at horizon " + std::to_string(res.verdict.horizon) +
             (res.verdict.witness ? " (witness n=" + std::to_string(*res.verdict.witness) + ")" : ""));
  return res;
}

BranchBound nearBranchBound(const Rational& a, const Rational& eps1) {
  return {(1 - eps1) * a / 2, (Rational(1, 3) + a / 2) * a, a * a};
}

BranchBound kBranchBound(long long k, const Rational& a, const Rational& epsK) {
  const Rational kk = fromInt(k);
  const Rational c1 = a - a / (kk + 1);
  const Rational c3 = a / (kk + 2);
  const Rational line3 = (1 - epsK) * (c1 * c1 + c3);
  const Rational line4 = (1 - epsK) * a * a * (1 + (kk * (1 - 2 * a) + 1 - 4 * a) / (a * (kk + 1) * (kk + 2)));
  return {line3, line4, a * a};
}

MarginReport verifyOverRecMargins(const OverRecState& state, const StagedTransformation& t) {
  MarginReport rep;
  const Rational& a = state.a;
  const Rational eps1 = state.steps.empty() ? chooseEpsilon(1, a) : state.steps.front().eps;
  rep.nearBranch = nearBranchBound(a, eps1);
  if (!rep.nearBranch.holds())
    fail(ErrorKind::Verification, "MarginViolated", "near branch bound fails for a=" + formatRational(a));
  for (const auto& step : state.steps) {
    rep.kBranches.push_back(kBranchBound(step.k, a, step.eps));
    if (!rep.kBranches.back().holds())
      fail(ErrorKind::Verification, "MarginViolated", stepTag(step.k) + "displayed chain fails");
  }
  if (state.steps.empty()) return rep;

  const Rational mu2 = state.A.measure() * state.A.measure();
  const long long reach = state.steps.back().scale.verifiedUpTo;
  const auto whole = correlationTable(t.map, state.A, state.A, reach);
  bool first = true;
  auto check = [&](long long n, const Rational& total) {
    const Rational slack = total - mu2;
    if (first || slack < rep.worstSlack) rep.worstSlack = slack;
    first = false;
    ++rep.checkedNs;
    if (slack <= 0)
      fail(ErrorKind::Verification, "MarginViolated", "μ(TⁿA∩A) <= μ(A)² at n=" + std::to_string(n));
  };

  // |n| < N_1: the bulk ∪_{k>=2} A_k carries the bound.
  const long long N1 = state.steps.front().scale.N;
  for (long long n = 1; n < N1; ++n)
    for (long long s : {n, -n}) check(s, exactAt(whole, s));

  // N_k <= |n| < N_{k+1}: exact three-part decomposition C_k, A_{k+1}, tail.
  for (std::size_t idx = 0; idx < state.steps.size(); ++idx) {
    const auto& step = state.steps[idx];
    const long long lo = step.scale.N;
    const long long hi = idx + 1 < state.steps.size() ? state.steps[idx + 1].scale.N : reach + 1;
    const IntervalSet c1 = state.C(step.k);
    const IntervalSet& c2 = state.parts[static_cast<std::size_t>(step.k)];
    const IntervalSet c3 = state.A - c1 - c2;
    const auto t1 = correlationTable(t.map, c1, state.A, hi - 1);
    const auto t2 = correlationTable(t.map, c2, state.A, hi - 1);
    const auto t3 = correlationTable(t.map, c3, state.A, hi - 1);
    for (long long n = lo; n < hi; ++n) {
      for (long long s : {n, -n}) {
        const Rational total = exactAt(whole, s);
        if (exactAt(t1, s) + exactAt(t2, s) + exactAt(t3, s) != total)
          fail(ErrorKind::Verification, "MarginViolated", "decomposition does not add up at n=" + std::to_string(s));
        check(s, total);
      }
    }
  }
  return rep;
}

TransferResult transferEpsOverRecurrent(const TransferPlan& plan) {
  require(plan.source && plan.target, "transfer needs a source and a target");
  require(plan.eps > 0, "ε must be positive");
  const Rational muA = plan.A.measure();
  require(muA > 0 && muA < 1, "transfer needs 0 < μ(A) < 1");
  if (plan.h < 2) fail(ErrorKind::Verification, "ToleranceUnmet", "tower of height " + std::to_string(plan.h) + " is too shallow");

  TransferResult res;
  const Tower s = extractTower(*plan.source, plan.h, 0);
  res.sourceResidual = 1 - s.coverage();
  if (!(res.sourceResidual < plan.eps * muA / 4))
    fail(ErrorKind::Verification, "ToleranceUnmet", "source tower residual " + formatRational(res.sourceResidual) + " is too large");
  std::vector<IntervalSet> picked;
  for (long long i = 0; i < plan.h; ++i) {
    const IntervalSet& L = s.levels[static_cast<std::size_t>(i)];
    if (2 * intersectionMeasure(plan.A, L) > L.measure()) {
      res.levels.push_back(i);
      picked.push_back(L);
    }
  }
  res.J = unionAll(picked);
  res.symmetricDifference = (plan.A ^ res.J).measure();
  if (!(res.symmetricDifference < plan.eps / 4 * muA))
    fail(ErrorKind::Verification, "ToleranceUnmet",
         "μ(A△J) = " + formatRational(res.symmetricDifference) + " is not below (ε/4)μ(A)");

  const Tower tt = extractTower(*plan.target, plan.h, 0);
  res.targetResidual = 1 - tt.coverage();
  if (!(res.targetResidual < plan.eps * muA / (4 * fromInt(plan.h))))
    fail(ErrorKind::Verification, "ToleranceUnmet",
         "target tower residual " + formatRational(res.targetResidual) + " is not below εμ(A)/(4h)");
  std::vector<IntervalSet> mirrored;
  for (long long i : res.levels) mirrored.push_back(tt.levels[static_cast<std::size_t>(i)]);
  res.K = unionAll(mirrored);
  res.verdict = classify(plan.target->map, res.K, plan.h - 1, plan.eps);
  return res;
}

}  // namespace ergo
