#include "ergo/towerplex.hpp"

#include <algorithm>

#include "ergo/errors.hpp"

namespace ergo {
namespace {

[[noreturn]] void caseMismatch(const std::string& what) { fail(ErrorKind::Precondition, "CaseMismatch", what); }

PiecewiseTranslation uniteAll(const std::vector<PiecewiseTranslation>& maps) {
  std::vector<TranslationPiece> all;
  for (const auto& m : maps) all.insert(all.end(), m.pieces().begin(), m.pieces().end());
  return PiecewiseTranslation::fromPieces(std::move(all));
}

std::vector<IntervalSet> column(const PiecewiseTranslation& m, const IntervalSet& base, long long h) {
  std::vector<IntervalSet> levels;
  levels.reserve(static_cast<std::size_t>(h));
  IntervalSet cur = base;
  for (long long i = 0; i < h; ++i) {
    levels.push_back(cur);
    if (i + 1 < h) cur = m.image(cur);
  }
  return levels;
}

IntervalSet columnSupport(const PiecewiseTranslation& m, const IntervalSet& base, long long h) {
  return unionAll(column(m, base, h));
}

// Slice [from, from + m) of s in measure order.
IntervalSet slice(const IntervalSet& s, const Rational& from, const Rational& m) {
  return s.prefixOfMeasure(from + m) - s.prefixOfMeasure(from);
}

Tower pullBack(const PiecewiseAffineMap& phi, const Tower& seed) {
  const PiecewiseAffineMap inv = phi.inverse();
  Tower t;
  t.height = seed.height;
  t.base = inv.image(seed.base);
  for (const auto& l : seed.levels) t.levels.push_back(inv.image(l));
  return t;
}

void prepareTowers(TowerplexStage& st, const StagedTransformation& R, const StagedTransformation& S) {
  st.towerR = pullBack(st.Phi, extractTower(R, st.h, 0));
  st.towerS = pullBack(st.Psi, extractTower(S, st.h, 0));
  st.Xstar = st.X - st.towerR.support();
  st.Ystar = st.Y - st.towerS.support();
  const Rational covered = st.towerR.support().measure() + st.towerS.support().measure();
  if (!(covered > 1 - st.eps))
    fail(ErrorKind::StageExhausted, "CoverageUnattainable",
         "stage " + std::to_string(st.n) + ": towers of height " + std::to_string(st.h) + " cover " +
             formatRational(covered) + ", not above 1 − ε_n");
  st.Iprime = st.towerR.base.prefixOfMeasure(st.r * st.towerR.base.measure());
  st.Jprime = st.towerS.base.prefixOfMeasure(st.s * st.towerS.base.measure());
  if (R.recipe.rigid) {
    for (long long rho : rigiditySequence(R.recipe, R.stage))
      if (rho >= st.h && rho % st.h == 0) st.rigidTimes.push_back(rho);
  }
}

struct SideInput {
  const PiecewiseTranslation* own;
  const PiecewiseTranslation* other;
  IntervalSet base, prime, incoming, residual;
  Rational sideMass;
  long long h;
  bool carveFromIncoming;
  bool caseLaw;
};

// Base map new base -> old base. With the case law the retained part p0 is
// kept inside itself (contraction) or swallowed (inflation).
PiecewiseAffineMap baseMap(const IntervalSet& newBase, const IntervalSet& base, const IntervalSet& p0,
                           bool caseLaw) {
  if (!caseLaw || p0.empty()) return normalizedTransport(newBase, base);
  const Rational lambda = base.measure() / newBase.measure();
  const IntervalSet rest = newBase - p0;
  std::vector<PiecewiseAffineMap> parts;
  if (lambda == 1) {
    parts.push_back(PiecewiseAffineMap::identity(p0));
    parts.push_back(normalizedTransport(rest, base - p0));
  } else if (lambda < 1) {
    const IntervalSet inner = p0.prefixOfMeasure(lambda * p0.measure());
    parts.push_back(normalizedTransport(p0, inner));
    parts.push_back(normalizedTransport(rest, base - inner));
  } else {
    const IntervalSet p0a = p0.prefixOfMeasure(p0.measure() / lambda);
    const IntervalSet p0b = p0 - p0a;
    const IntervalSet room = base - p0;
    if (room.measure() < lambda * p0b.measure()) caseMismatch("no room outside the retained base to inflate into");
    const IntervalSet spill = room.prefixOfMeasure(lambda * p0b.measure());
    parts.push_back(normalizedTransport(p0a, p0));
    parts.push_back(normalizedTransport(p0b, spill));
    parts.push_back(normalizedTransport(rest, room - spill));
  }
  return unite(parts);
}

SideTransfer buildSide(const SideInput& in, const Rational& b) {
  SideTransfer out;
  const long long h = in.h;
  const Rational H = fromInt(h);
  out.rescaling = rescaleSide(H * in.base.measure(), in.sideMass, b);
  const Rational& d = out.rescaling.d;
  IntervalSet retained = in.base - in.prime;
  IntervalSet incoming = in.incoming;
  out.newResidual = in.residual;

  if (d > 0) {
    IntervalSet& source = in.carveFromIncoming ? incoming : retained;
    if (source.measure() < d / H) caseMismatch("carve set is smaller than d/h");
    out.carved = source.prefixOfMeasure(d / H);
    source = source - out.carved;
    const auto& mover = in.carveFromIncoming ? *in.other : *in.own;
    out.newResidual = out.newResidual | columnSupport(mover, out.carved, h);
  } else if (d < 0) {
    const Rational m = -d / H;
    if (in.residual.measure() < m * H) caseMismatch("residual is smaller than |d|");
    std::vector<PiecewiseTranslation> links;
    for (long long i = 0; i < h; ++i) out.chunks.push_back(slice(in.residual, m * fromInt(i), m));
    for (long long i = 0; i + 1 < h; ++i)
      links.push_back(normalizedTransport(out.chunks[static_cast<std::size_t>(i)],
                                          out.chunks[static_cast<std::size_t>(i + 1)])
                          .toTranslation());
    out.chain = uniteAll(links);
    out.newResidual = in.residual - unionAll(out.chunks);
  }
  out.retained = retained;
  out.newBase = retained | incoming;
  if (!out.chunks.empty()) out.newBase = out.newBase | out.chunks.front();

  const auto ownCol = column(*in.own, retained, h);
  const auto otherCol = column(*in.other, incoming, h);
  std::vector<PiecewiseTranslation> steps;
  for (long long i = 0; i < h; ++i) {
    const auto k = static_cast<std::size_t>(i);
    IntervalSet lvl = ownCol[k] | otherCol[k];
    if (!out.chunks.empty()) lvl = lvl | out.chunks[k];
    out.newLevels.push_back(lvl);
    if (i + 1 < h) {
      steps.push_back(in.own->restrictedTo(ownCol[k]));
      steps.push_back(in.other->restrictedTo(otherCol[k]));
      if (!out.chunks.empty()) steps.push_back(out.chain.restrictedTo(out.chunks[k]));
    }
  }
  const PiecewiseTranslation G = uniteAll(steps);
  const PiecewiseTranslation Ginv = G.inverse();

  std::vector<PiecewiseAffineMap> conjParts;
  conjParts.push_back(normalizedTransport(out.newResidual, in.residual));
  conjParts.push_back(baseMap(out.newBase, in.base, retained, in.caseLaw));
  const PiecewiseAffineMap ownAffine = PiecewiseAffineMap::fromTranslation(*in.own);
  for (long long i = 1; i < h; ++i) {
    const auto down = PiecewiseAffineMap::fromTranslation(Ginv.restrictedTo(out.newLevels[static_cast<std::size_t>(i)]));
    conjParts.push_back(compose(compose(ownAffine, conjParts.back()), down));
  }
  out.conj = unite(conjParts);

  const PiecewiseTranslation full = conjugate(out.conj, *in.own);
  const IntervalSet tail = out.newLevels.back() | out.newResidual;
  out.newMap = uniteAll({G, full.restrictedTo(tail)});
  const IntervalSet common = out.newMap.domain() & full.domain();
  out.conjugacyOk = (disagreementSet(out.newMap, full) & common).empty();
  return out;
}

}  // namespace

Rescaling solveRescaling(const Rational& a, const Rational& b) {
  require(a > 0 && a <= Rational(1, 2), "a must lie in (0, 1/2]");
  Rescaling s{a, b, 1 + 2 * b, (1 - 2 * a) * b};
  if (s.c <= 0) fail(ErrorKind::Precondition, "DegenerateScale", "scale c = " + formatRational(s.c) + " is not positive");
  if (a + b - s.d != s.c * a || Rational(1, 2) - a + s.d != s.c * (Rational(1, 2) - a))
    fail(ErrorKind::Verification, "LemmaViolated", "rescaling equations fail by substitution");
  return s;
}

Rescaling rescaleSide(const Rational& towerMass, const Rational& sideMass, const Rational& b) {
  require(sideMass > 0, "side measure must be positive");
  require(towerMass > 0 && towerMass <= sideMass, "tower mass must lie in (0, side measure]");
  Rescaling s{towerMass, b, (sideMass + b) / sideMass, b * (1 - towerMass / sideMass)};
  if (s.c <= 0) fail(ErrorKind::Precondition, "DegenerateScale", "scale c = " + formatRational(s.c) + " is not positive");
  if (towerMass + b - s.d != s.c * towerMass || sideMass - towerMass + s.d != s.c * (sideMass - towerMass))
    fail(ErrorKind::Verification, "LemmaViolated", "rescaling equations fail by substitution");
  return s;
}

TowerplexConfig::TowerplexConfig() : seedR(*builtinRecipe("odometer")), seedS(*builtinRecipe("staircase")) {}

Rational TowerplexConfig::eps(int n) const {
  Rational e = 1;
  for (int i = 0; i < n; ++i) e *= epsRatio;
  return e;
}

long long TowerplexConfig::height(int n) const { return h1 << (n - 1); }

Rational TowerplexConfig::s(int n) const { return Rational(1) / fromInt(2 * (n + 2)); }

PiecewiseTranslation TowerplexStage::T() const {
  std::vector<TranslationPiece> all(R.pieces().begin(), R.pieces().end());
  all.insert(all.end(), S.pieces().begin(), S.pieces().end());
  return PiecewiseTranslation::fromPieces(std::move(all));
}

TowerplexStage initStage1(const StagedTransformation& R, const StagedTransformation& S, const Rational& eps1,
                          long long h1, const Rational& r1, const Rational& s1) {
  require(eps1 > 0 && eps1 < 1, "ε_1 must lie in (0,1)");
  require(h1 >= 1, "h_1 must be positive");
  TowerplexStage st;
  st.n = 1;
  st.eps = eps1;
  st.r = r1;
  st.s = s1;
  st.h = h1;
  const Rational half(1, 2);
  st.X = IntervalSet::interval(0, half);
  st.Y = IntervalSet::interval(half, 1);
  st.Phi = PiecewiseAffineMap::fromPieces({{Interval(0, half), Rational(2), Rational(0)}});
  st.Psi = PiecewiseAffineMap::fromPieces({{Interval(half, 1), Rational(2), Rational(-1)}});
  st.R = conjugate(st.Phi, R.map);
  st.S = conjugate(st.Psi, S.map);
  prepareTowers(st, R, S);
  if (!(st.Xstar.measure() < eps1 / 2) || !(st.Ystar.measure() < eps1 / 2))
    fail(ErrorKind::StageExhausted, "CoverageUnattainable", "stage-1 tower residuals are not below ε_1/2");
  return st;
}

TowerplexStage advanceStage(TowerplexStage& cur, const StagedTransformation& R, const StagedTransformation& S,
                            const Rational& epsNext, long long hNext, const Rational& rNext, const Rational& sNext) {
  const long long h = cur.h;
  const Rational b = fromInt(h) * (cur.Jprime.measure() - cur.Iprime.measure());

  SideInput rIn{&cur.R, &cur.S, cur.towerR.base, cur.Iprime, cur.Jprime, cur.Xstar, cur.X.measure(), h, true, false};
  SideInput sIn{&cur.S, &cur.R, cur.towerS.base, cur.Jprime, cur.Iprime, cur.Ystar, cur.Y.measure(), h, false, true};
  cur.sideR = buildSide(rIn, b);
  cur.sideS = buildSide(sIn, -b);

  const IntervalSet colI = columnSupport(cur.R, cur.Iprime, h);
  const IntervalSet colJ = columnSupport(cur.S, cur.Jprime, h);
  TowerplexStage next;
  next.n = cur.n + 1;
  next.eps = epsNext;
  next.r = rNext;
  next.s = sNext;
  next.h = hNext;
  next.X = (cur.X - colI) | colJ;
  next.Y = (cur.Y - colJ) | colI;
  if (unionAll(cur.sideR->newLevels) - next.X != IntervalSet() || (cur.sideR->newResidual - next.X) != IntervalSet() ||
      (unionAll(cur.sideR->newLevels) | cur.sideR->newResidual) != next.X ||
      (unionAll(cur.sideS->newLevels) | cur.sideS->newResidual) != next.Y)
    fail(ErrorKind::Verification, "LedgerViolation", "rebuilt towers and residuals do not tile X_{n+1}, Y_{n+1}");
  if ((next.X & next.Y) != IntervalSet() || (next.X | next.Y) != IntervalSet::unit())
    fail(ErrorKind::Verification, "LedgerViolation", "X_{n+1}, Y_{n+1} do not partition [0,1)");

  next.R = cur.sideR->newMap;
  next.S = cur.sideS->newMap;
  next.Phi = compose(cur.Phi, cur.sideR->conj);
  next.Psi = compose(cur.Psi, cur.sideS->conj);
  prepareTowers(next, R, S);

  cur.E = disagreementSet(cur.T(), next.T());
  cur.Pprime = column(cur.S, cur.sideS->retained, h);
  cur.Q.clear();
  for (const auto& p : cur.Pprime) cur.Q.push_back(cur.sideS->conj.image(p));
  long long parts = 0;
  for (const auto* s : {&cur.Xstar, &cur.Ystar})
    if (!s->empty()) ++parts;
  for (const auto* s : {&cur.Iprime, &cur.Jprime})
    if (!s->empty()) parts += h;
  if (!(cur.towerR.base - cur.Iprime).empty()) parts += h;
  if (!(cur.towerS.base - cur.Jprime).empty()) parts += h;
  if (!cur.sideS->carved.empty()) parts += h;  // J* column refines S^i(J∖J')
  if (!cur.sideR->carved.empty()) parts += h;  // I* column refines S^i(J')
  cur.partitionSize = parts;
  return next;
}

ChainCheck checkChain(const TowerplexStage& cur, const TowerplexStage& next) {
  require(cur.sideS.has_value(), "stage has not been advanced");
  ChainCheck c;
  c.ratio = next.Y.measure() / cur.Y.measure();
  for (std::size_t k = 0; k < cur.Pprime.size(); ++k) {
    const IntervalSet& p = cur.Pprime[k];
    const IntervalSet& q = cur.Q[k];
    if (p.measure() / q.measure() != c.ratio) c.ratioOk = false;
    if (c.ratio > 1 && !p.includes(q)) c.inclusionOk = false;
    if (c.ratio < 1 && !q.includes(p)) c.inclusionOk = false;
    if (c.ratio == 1 && p != q) c.inclusionOk = false;
    const Rational dist = (p ^ q).measure();
    const Rational bound = abs(c.ratio - 1);
    if (c.ratio == 1 ? dist != 0 : !(dist < bound)) c.distortionOk = false;
  }
  return c;
}

TowerplexRun runTowerplex(const TowerplexConfig& cfg) {
  require(cfg.stages >= 1, "at least one stage is required");
  require(cfg.h1 >= 1, "h_1 must be positive");
  require(cfg.epsRatio > 0 && cfg.epsRatio < 1, "ε ratio must lie in (0,1)");
  require(cfg.r > 0 && cfg.r < 1, "r must lie in (0,1)");
  require(cfg.kappa > 0, "κ must be positive");
  TowerplexRun run;
  run.config = cfg;
  const long long hMax = cfg.height(cfg.stages);
  BuildOptions opts;
  opts.pieceBudget = cfg.pieceBudget;

  int rStage = 0;
  if (cfg.seedRStage) {
    rStage = *cfg.seedRStage;
  } else {
    while ((1LL << rStage) < hMax) ++rStage;
    rStage += 3;
  }
  run.seedR = buildStage(cfg.seedR, rStage, opts);

  if (cfg.seedSStage) {
    run.seedS = buildStage(cfg.seedS, *cfg.seedSStage, opts);
  } else {
    for (int k = 1;; ++k) {
      const auto hs = stageHeights(cfg.seedS, k);
      const long long H = hs.back();
      if (H > cfg.pieceBudget)
        fail(ErrorKind::StageExhausted, "StageTooLarge", "no seed stage for S keeps its residual below ε_n/2");
      bool ok = H >= hMax;
      for (int n = 1; ok && n <= cfg.stages; ++n)
        ok = makeRational(H % cfg.height(n), H) < cfg.eps(n) / 2;
      if (ok) {
        run.seedS = buildStage(cfg.seedS, k, opts);
        break;
      }
    }
  }

  run.stages.push_back(initStage1(run.seedR, run.seedS, cfg.eps(1), cfg.h1, cfg.r, cfg.s(1)));
  run.sumEps = cfg.eps(1);
  run.sumR = cfg.r;
  run.sumS = cfg.s(1);
  for (int n = 2; n <= cfg.stages; ++n) {
    TowerplexStage next =
        advanceStage(run.stages.back(), run.seedR, run.seedS, cfg.eps(n), cfg.height(n), cfg.r, cfg.s(n));
    const TowerplexStage& cur = run.stages.back();
    if (!cur.sideR->conjugacyOk || !cur.sideS->conjugacyOk)
      fail(ErrorKind::Verification, "LedgerViolation",
           "stage " + std::to_string(cur.n) + ": table form differs from the conjugate");
    run.chains.push_back(checkChain(cur, next));
    LedgerEntry e{cur.n, cur.E.measure(), cfg.kappa * cur.eps};
    run.ledger.push_back(e);
    if (!e.ok())
      fail(ErrorKind::Verification, "LedgerViolation",
           "μ(E_" + std::to_string(cur.n) + ") = " + formatRational(e.muE) + " is not below κε_n = " +
               formatRational(e.bound));
    run.stages.push_back(std::move(next));
    run.sumEps += cfg.eps(n);
    run.sumR += cfg.r;
    run.sumS += cfg.s(n);
  }
  return run;
}

namespace {

// Bounds on μ(M^i A ∩ B) for i = 1..iMax, for every B at once.
std::vector<std::vector<CorrelationBounds>> sweepPairs(const PiecewiseTranslation& m, const IntervalSet& A,
                                                       const std::vector<IntervalSet>& Bs, long long iMax) {
  std::vector<std::vector<CorrelationBounds>> out(static_cast<std::size_t>(iMax));
  IntervalSet cur = A;
  Rational blocked = 0;
  for (long long i = 1; i <= iMax; ++i) {
    auto r = m.imagePartial(cur);
    blocked += r.blocked.measure();
    cur = std::move(r.image);
    for (const auto& B : Bs) {
      CorrelationBounds b;
      b.lower = intersectionMeasure(cur, B);
      b.blocked = blocked;
      b.upper = b.lower + blocked;
      const Rational cap = A.measure() < B.measure() ? A.measure() : B.measure();
      if (b.upper > cap) b.upper = cap;
      out[static_cast<std::size_t>(i - 1)].push_back(b);
    }
  }
  return out;
}

Rational maxDeviation(const CorrelationBounds& b, const Rational& ref) {
  const Rational x = abs(b.lower - ref), y = abs(b.upper - ref);
  return x > y ? x : y;
}

Rational minDeviation(const CorrelationBounds& b, const Rational& ref) {
  if (b.lower <= ref && ref <= b.upper) return 0;
  const Rational x = abs(b.lower - ref), y = abs(b.upper - ref);
  return x < y ? x : y;
}

}  // namespace

LemmaReport checkRescalingLemma(const TowerplexStage& cur, const TowerplexStage& next, const Rational& delta,
                                long long iMax) {
  require(cur.sideS.has_value(), "stage has not been advanced");
  require(iMax >= 1, "iMax must be at least 1");
  if (!(cur.eps + cur.X.measure() < delta / 6))
    fail(ErrorKind::Precondition, "HypothesisUnmet",
         "ε_n + μ(X_n) = " + formatRational(cur.eps + cur.X.measure()) + " is not below δ/6");
  LemmaReport rep;
  rep.delta = delta;
  const ChainCheck chain = checkChain(cur, next);
  const Rational bound = abs(chain.ratio - 1);
  bool firstD = true;
  for (std::size_t k = 0; k < cur.Pprime.size(); ++k) {
    const Rational dist = (cur.Pprime[k] ^ cur.Q[k]).measure();
    const Rational slack = bound - dist;
    if (firstD || slack < rep.worstDistortionSlack) rep.worstDistortionSlack = slack;
    firstD = false;
    if (chain.ratio == 1 ? dist != 0 : !(dist < bound))
      fail(ErrorKind::Verification, "LemmaViolated", "μ(A△ψA) is not below |ratio − 1|");
  }
  bool first = true;
  for (std::size_t a = 0; a < cur.Q.size(); ++a) {
    const IntervalSet& A = cur.Q[a];
    const auto after = sweepPairs(next.S, A, cur.Q, iMax);
    const auto before = sweepPairs(cur.S, A, cur.Q, iMax);
    for (std::size_t bIdx = 0; bIdx < cur.Q.size(); ++bIdx) {
      const Rational ref = A.measure() * cur.Q[bIdx].measure();
      ++rep.pairs;
      for (long long i = 1; i <= iMax; ++i) {
        const auto& nb = after[static_cast<std::size_t>(i - 1)][bIdx];
        const auto& ob = before[static_cast<std::size_t>(i - 1)][bIdx];
        const Rational lhs = maxDeviation(nb, ref);
        const Rational rhs = minDeviation(ob, ref) + delta;
        const Rational slack = rhs - lhs;
        if (first || slack < rep.worstSlack) rep.worstSlack = slack;
        first = false;
        ++rep.checks;
        if (!(slack > 0))
          fail(ErrorKind::Verification, "LemmaViolated",
               "pair (" + std::to_string(a) + "," + std::to_string(bIdx) + ") fails at i=" + std::to_string(i));
      }
    }
  }
  return rep;
}

SlowMixingWitness slowMixingWindow(const TowerplexStage& st, const IntervalSet& A, const Rational& delta) {
  const Rational alpha = A.measure();
  require(alpha > 0 && alpha < 1, "slow-mixing window needs 0 < μ(A) < 1");
  require(delta > 0, "δ must be positive");
  const Rational nn = fromInt(st.n);
  SlowMixingWitness w;
  w.N = requiredN(alpha, delta / nn * alpha * alpha);

  const IntervalSet AS = A & st.Y;
  if (!AS.empty()) {
    const Rational need = (1 - delta / nn) * AS.measure() * AS.measure();
    const auto rows = sweepPairs(st.S, AS, {AS}, w.N - 1);
    for (long long i = 1; i < w.N && !w.eq8; ++i)
      if (rows[static_cast<std::size_t>(i - 1)][0].lower > need) w.eq8 = i;
  }
  const IntervalSet AX = A & st.X;
  if (!AX.empty()) {
    const Rational need = (1 - delta / nn) * AX.measure();
    for (long long rho : st.rigidTimes) {
      if (static_cast<long long>(w.rigidTimes.size()) >= w.N) break;
      if (correlationBounds(st.R, AX, AX, rho).lower > need) w.rigidTimes.push_back(rho);
    }
  }

  std::vector<long long> candidates;
  for (long long i = 1; i < w.N; ++i) candidates.push_back(i);
  candidates.insert(candidates.end(), w.rigidTimes.begin(), w.rigidTimes.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  const PiecewiseTranslation T = st.T();
  const Rational mu2 = alpha * alpha;
  IntervalSet cur = A;
  Rational blocked = 0;
  long long at = 0;
  for (long long i : candidates) {
    while (at < i) {
      auto r = T.imagePartial(cur);
      blocked += r.blocked.measure();
      cur = std::move(r.image);
      ++at;
    }
    const Rational lower = intersectionMeasure(cur, A);
    if (lower > mu2) {
      w.witness = i;
      w.value = lower;
      return w;
    }
  }
  fail(ErrorKind::StageExhausted, "WindowExhausted",
       "no certified positive term among " + std::to_string(candidates.size()) + " candidate times");
}

}  // namespace ergo
