#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ergo/builders.hpp"
#include "ergo/recurrence.hpp"
#include "ergo/towers.hpp"

namespace ergo {

/// Stage-1 rescaling with μ(X_1) = 1/2: d = (1−2a)b, c = 1+2b. Both linear
/// equations are checked by substitution. Raises DegenerateScale if c <= 0.
struct Rescaling {
  Rational a, b, c, d;
};
Rescaling solveRescaling(const Rational& a, const Rational& b);

/// General side form: a side of measure m with tower mass a gains b of tower
/// mass; c = (m+b)/m and d = b(1 − a/m) is the mass moved from the tower to
/// the residual so that tower : residual keeps its ratio.
Rescaling rescaleSide(const Rational& towerMass, const Rational& sideMass, const Rational& b);

struct TowerplexConfig {
  int stages = 3;
  long long h1 = 8;
  Rational epsRatio{1, 4};  // ε_n = epsRatio^n
  Rational r{1, 2};
  Rational kappa{8};
  Recipe seedR;
  Recipe seedS;
  std::optional<int> seedRStage;  // default: log2(max h) + 3
  std::optional<int> seedSStage;  // default: smallest stage whose leftover levels stay below ε_n/2
  long long pieceBudget = 4'000'000;

  TowerplexConfig();
  Rational eps(int n) const;
  long long height(int n) const;  // h_1 · 2^(n−1)
  Rational s(int n) const;        // 1/(2(n+2))
};

/// One side's transfer bookkeeping for a stage change.
struct SideTransfer {
  Rescaling rescaling;     // a = tower mass, b = tower mass gained
  IntervalSet carved;      // column base moved from the tower to the residual (delta > 0)
  std::vector<IntervalSet> chunks;  // residual chunks joined to the tower (delta < 0)
  PiecewiseTranslation chain;       // chunk i -> chunk i+1 (α or β)
  IntervalSet retained;    // own base part that stays (P' generator on the S side)
  IntervalSet newBase;
  std::vector<IntervalSet> newLevels;
  IntervalSet newResidual;
  PiecewiseAffineMap conj;  // τ or ψ: new side -> old side
  PiecewiseTranslation newMap;
  bool conjugacyOk = false;  // table form equals conj⁻¹∘M∘conj on the common domain
};

struct TowerplexStage {
  int n = 1;
  Rational eps, r, s;
  long long h = 0;
  IntervalSet X, Y;
  PiecewiseTranslation R, S;
  PiecewiseAffineMap Phi, Psi;  // X_n -> [0,1), Y_n -> [0,1)
  Tower towerR, towerS;
  IntervalSet Iprime, Jprime, Xstar, Ystar;
  std::vector<long long> rigidTimes;  // rigidity times of R_n inherited from the seed

  // Filled when the stage is advanced.
  std::optional<SideTransfer> sideR, sideS;
  std::vector<IntervalSet> Pprime, Q;
  long long partitionSize = 0;
  IntervalSet E;

  PiecewiseTranslation T() const;
};

struct LedgerEntry {
  int n = 0;
  Rational muE, bound;  // bound = κ ε_n
  bool ok() const { return muE < bound; }
};

struct ChainCheck {
  Rational ratio;            // μ(Y_{n+1}) / μ(Y_n)
  bool ratioOk = true;       // μ(p)/μ(ψ(p)) == ratio for every p in P'
  bool inclusionOk = true;   // ψ(p) ⊆ p when Y grows, p ⊆ ψ(p) when it shrinks, equal when it keeps
  bool distortionOk = true;  // μ(p △ ψ(p)) < |ratio − 1| (<= when ratio = 1)
};

struct TowerplexRun {
  TowerplexConfig config;
  StagedTransformation seedR, seedS;
  std::vector<TowerplexStage> stages;
  std::vector<LedgerEntry> ledger;
  std::vector<ChainCheck> chains;
  Rational sumEps, sumR, sumS;
};

/// X_1 = [0,1/2), Y_1 = [1/2,1), seeds conjugated onto each half.
TowerplexStage initStage1(const StagedTransformation& R, const StagedTransformation& S, const Rational& eps1,
                          long long h1, const Rational& r1, const Rational& s1);

/// Rescales both sides, builds τ, ψ (and α, β when needed), and returns
/// stage n+1. Fills the transfer records and E_n on `cur`.
TowerplexStage advanceStage(TowerplexStage& cur, const StagedTransformation& R, const StagedTransformation& S,
                            const Rational& epsNext, long long hNext, const Rational& rNext, const Rational& sNext);

ChainCheck checkChain(const TowerplexStage& cur, const TowerplexStage& next);

/// Runs config.stages stages and checks μ(E_n) < κ ε_n (LedgerViolation).
TowerplexRun runTowerplex(const TowerplexConfig& config);

struct LemmaReport {
  Rational delta;
  long long pairs = 0, checks = 0;
  Rational worstSlack;  // min of rhs − lhs
  Rational worstDistortionSlack;
};

/// Raises HypothesisUnmet unless ε_n + μ(X_n) < δ/6, LemmaViolated on the
/// first failing (A, B, i).
LemmaReport checkRescalingLemma(const TowerplexStage& cur, const TowerplexStage& next, const Rational& delta,
                                long long iMax);

struct SlowMixingWitness {
  long long N = 0;                  // Lemma 4.2 window size
  std::optional<long long> eq8;     // S-side i with μ(S^iA∩A) > (1−δ/n)μ(A)²
  std::vector<long long> rigidTimes;  // R-side times checked for μ(R^ρA∩A) > (1−δ/n)μ(A)
  long long witness = 0;            // smallest i with μ(T^iA∩A) − μ(A)² > 0 certified
  Rational value;
};

/// Raises WindowExhausted when no positive term is certified.
SlowMixingWitness slowMixingWindow(const TowerplexStage& st, const IntervalSet& A, const Rational& delta);

}  // namespace ergo
