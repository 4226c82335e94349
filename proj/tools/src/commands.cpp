#include <chrono>
#include <functional>
#include <sstream>

#include "ergo/builders.hpp"
#include "ergo/overrec.hpp"
#include "ergo/rational.hpp"
#include "ergo/recurrence.hpp"
#include "ergo/serialize.hpp"
#include "ergo/towerplex.hpp"
#include "ergo_cli/cli.hpp"

namespace ergo::cli {

namespace {

template <class F>
auto timed(Manifest& m, const std::string& op, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  auto guard = [&] { m.timing(op, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()); };
  try {
    auto r = f();
    guard();
    return r;
  } catch (...) {
    guard();
    throw;
  }
}

std::string q(const Rational& v) { return formatRational(v); }

template <class T>
const T& need(const std::optional<T>& v, const char* flag, const std::string& sub) {
  if (!v) fail(ErrorKind::Precondition, "MissingOption", sub + " requires " + flag);
  return *v;
}

std::string joinInts(const std::vector<long long>& xs) {
  std::string s;
  for (long long x : xs) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s.empty() ? "-" : s;
}

StagedTransformation load(Manifest& m, const std::string& key, const std::string& recipe, int stage) {
  const Recipe r = loadRecipe(recipe);
  auto t = timed(m, "build." + key, [&] { return buildStage(r, stage); });
  m.set(key + ".recipe", r.name);
  m.set(key + ".stage", std::to_string(stage));
  m.set(key + ".height", std::to_string(t.height()));
  m.set(key + ".pieces", std::to_string(t.map.pieces().size()));
  return t;
}

void emitTable(Manifest& m, const std::filesystem::path& dir, const std::string& stem, const CorrelationTable& table,
               const std::string& title) {
  m.set(stem + ".exact_rows", std::to_string(table.values.size()));
  m.set(stem + ".undefined_rows", std::to_string(table.undefinedNs.size()));
  m.artifact(dir, stem + ".csv", csvText(table));
  m.artifact(dir, stem + ".svg", correlationSvg(table, title));
}

void setVerdict(Manifest& m, const std::string& key, const RecurrenceVerdict& v) {
  m.set(key + ".verdict", v.name());
  m.set(key + ".horizon", std::to_string(v.horizon));
  m.set(key + ".margin", q(v.margin));
  if (v.witness) m.set(key + ".witness", std::to_string(*v.witness));
}

void cmdBuild(const RunConfig& c, Manifest& m, std::ostream& out) {
  const auto t = load(m, "map", need(c.recipe, "--recipe", "build"), c.stage.value_or(1));
  m.set("map.heights", joinInts(t.heights));
  m.set("map.width", q(t.width));
  m.set("map.domain_measure", q(t.map.domain().measure()));
  m.set("map.residual_measure", q(1 - t.map.domain().measure()));
  m.artifact(c.out, "map.txt", toText(t.map));
  out << "height: " << t.height() << "\npieces: " << t.map.pieces().size() << "\n";
}

void cmdCorrelate(const RunConfig& c, Manifest& m, std::ostream& out, bool verdict) {
  const std::string sub = verdict ? "classify" : "correlate";
  const auto t = load(m, "map", need(c.recipe, "--recipe", sub), c.stage.value_or(1));
  const IntervalSet A = parseSetSpec(need(c.set, "--set", sub));
  if (verdict && c.setB) fail(ErrorKind::Precondition, "BadArguments", "classify takes a single --set");
  const IntervalSet B = c.setB ? parseSetSpec(*c.setB) : A;
  const long long H = c.horizon.value_or(1);
  if (H < 1) fail(ErrorKind::Precondition, "BadArguments", "--horizon must be at least 1");
  m.set("set.A", formatSetSpec(A));
  m.set("set.B", formatSetSpec(B));
  m.set("measure.A", q(A.measure()));
  m.set("measure.reference", q(A.measure() * B.measure()));
  const auto table = timed(m, "correlate", [&] { return correlationTable(t.map, A, B, H); });
  emitTable(m, c.out, "correlations", table, t.recipe.name + " stage " + std::to_string(t.stage));
  if (!verdict) {
    out << "rows: " << table.values.size() << "\nundefined: " << table.undefinedNs.size() << "\n";
    return;
  }
  const std::optional<Rational> eps = c.eps ? std::optional<Rational>(parseRational(*c.eps)) : std::nullopt;
  const auto v = timed(m, "classify", [&] { return classify(table, eps); });
  setVerdict(m, "result", v);
  out << "verdict: " << v.name() << "\nmargin: " << q(v.margin) << "\n";
}

void cmdOverRec(const RunConfig& c, Manifest& m, std::ostream& out) {
  const Rational a = parseRational(need(c.a, "--a", "construct-overrec"));
  if (!(a > 0 && a < Rational(1, 4)))
    fail(ErrorKind::Precondition, "BadArguments", "--a must lie in (0, 1/4)");
  const long long K = c.stages.value_or(2);
  OverRecOptions opts;
  opts.window = c.window.value_or(opts.window);
  opts.maxScan = c.maxScan.value_or(opts.maxScan);
  m.set("overrec.a", q(a));
  m.set("overrec.K", std::to_string(K));
  m.set("overrec.window", std::to_string(opts.window));

  // The near branch needs only a and ε_1, so it is recorded even if a step later fails.
  const BranchBound nb = nearBranchBound(a, chooseEpsilon(1, a));
  m.set("bound.near.lhs", q(nb.lhs));
  m.set("bound.near.mid", q(nb.mid));
  m.set("bound.near.rhs", q(nb.rhs));
  m.set("bound.near.holds", nb.holds() ? "true" : "false");

  const auto t = load(m, "map", c.recipe.value_or("staircase"), c.stage.value_or(6));
  const auto res = timed(m, "construct", [&] { return buildStrictlyOverRecurrentSet(t, a, K, opts); });
  const auto& st = res.state;
  for (std::size_t i = 0; i < st.parts.size(); ++i) {
    const std::string k = "part." + std::to_string(i + 1);
    m.set(k + ".budget", q(st.budget[i]));
    m.set(k + ".measure", q(st.parts[i].measure()));
  }
  for (const auto& s : st.steps) {
    const std::string k = "step." + std::to_string(s.k);
    m.set(k + ".eps", q(s.eps));
    m.set(k + ".N", std::to_string(s.scale.N));
    m.set(k + ".verified_up_to", std::to_string(s.scale.verifiedUpTo));
    m.set(k + ".worst_relative_error", q(s.scale.worstRelativeError));
    m.set(k + ".m", std::to_string(s.m));
    m.set(k + ".tower_height", std::to_string(s.towerHeight));
    m.set(k + ".tower_coverage", q(s.towerCoverage));
    m.set(k + ".margin", q(s.stepMargin));
  }
  m.set("set.A", formatSetSpec(st.A));
  m.set("measure.A", q(st.measure()));
  setVerdict(m, "result", res.verdict);
  const auto rep = timed(m, "verify", [&] { return verifyOverRecMargins(st, t); });
  for (std::size_t i = 0; i < rep.kBranches.size(); ++i) {
    const std::string k = "bound.k" + std::to_string(i + 1);
    m.set(k + ".lhs", q(rep.kBranches[i].lhs));
    m.set(k + ".mid", q(rep.kBranches[i].mid));
    m.set(k + ".holds", rep.kBranches[i].holds() ? "true" : "false");
  }
  m.set("verify.checked_ns", std::to_string(rep.checkedNs));
  m.set("verify.worst_slack", q(rep.worstSlack));
  const auto table = correlationTable(t.map, st.A, st.A, res.verdict.horizon);
  emitTable(m, c.out, "correlations", table, "constructed set");
  out << "measure: " << q(st.measure()) << "\nverdict: " << res.verdict.name() << "\n";
}

void cmdTransfer(const RunConfig& c, Manifest& m, std::ostream& out) {
  const auto src = load(m, "source", c.recipe.value_or("staircase"), c.stage.value_or(2));
  const auto dst = load(m, "target", c.targetRecipe.value_or("odometer"), c.targetStage.value_or(15));
  TransferPlan plan;
  plan.source = &src;
  plan.target = &dst;
  plan.A = parseSetSpec(need(c.set, "--set", "transfer"));
  plan.h = need(c.h, "--h", "transfer");
  plan.eps = parseRational(c.eps.value_or("1/5"));
  m.set("set.A", formatSetSpec(plan.A));
  m.set("transfer.h", std::to_string(plan.h));
  m.set("transfer.eps", q(plan.eps));
  const auto r = timed(m, "transfer", [&] { return transferEpsOverRecurrent(plan); });
  m.set("transfer.levels", joinInts(r.levels));
  m.set("transfer.J", formatSetSpec(r.J));
  m.set("transfer.K", formatSetSpec(r.K));
  m.set("transfer.symmetric_difference", q(r.symmetricDifference));
  m.set("transfer.source_residual", q(r.sourceResidual));
  m.set("transfer.target_residual", q(r.targetResidual));
  setVerdict(m, "result", r.verdict);
  emitTable(m, c.out, "correlations", correlationTable(dst.map, r.K, r.K, r.verdict.horizon), "transferred set");
  out << "verdict: " << r.verdict.name() << "\nmargin: " << q(r.verdict.margin) << "\n";
}

Rational geometricRatio(const std::string& s) {
  const std::string prefix = "geometric:";
  if (s.rfind(prefix, 0) != 0)
    fail(ErrorKind::Precondition, "BadArguments", "--eps for towerplex expects geometric:<ratio>");
  return parseRational(s.substr(prefix.size()));
}

void cmdTowerplex(const RunConfig& c, Manifest& m, std::ostream& out) {
  TowerplexConfig cfg;
  cfg.stages = c.stages.value_or(cfg.stages);
  cfg.h1 = c.h1.value_or(cfg.h1);
  if (c.eps) cfg.epsRatio = geometricRatio(*c.eps);
  if (c.kappa) cfg.kappa = parseRational(*c.kappa);
  if (c.seedR) cfg.seedR = loadRecipe(*c.seedR);
  if (c.seedS) cfg.seedS = loadRecipe(*c.seedS);
  cfg.seedRStage = c.seedRStage;
  cfg.seedSStage = c.seedSStage;
  m.set("towerplex.stages", std::to_string(cfg.stages));
  m.set("towerplex.h1", std::to_string(cfg.h1));
  m.set("towerplex.eps_ratio", q(cfg.epsRatio));
  m.set("towerplex.kappa", q(cfg.kappa));

  const auto run = timed(m, "towerplex", [&] { return runTowerplex(cfg); });
  m.set("seed.R", run.seedR.recipe.name + " stage " + std::to_string(run.seedR.stage));
  m.set("seed.S", run.seedS.recipe.name + " stage " + std::to_string(run.seedS.stage));
  const IntervalSet A = parseSetSpec(c.set.value_or("0/1:1/2"));
  m.set("set.A", formatSetSpec(A));
  for (const auto& st : run.stages) {
    const std::string k = "stage." + std::to_string(st.n);
    m.set(k + ".eps", q(st.eps));
    m.set(k + ".h", std::to_string(st.h));
    m.set(k + ".s", q(st.s));
    m.set(k + ".measure.X", q(st.X.measure()));
    m.set(k + ".measure.Y", q(st.Y.measure()));
    const bool part = (st.X & st.Y).empty() && (st.X | st.Y) == IntervalSet::unit();
    m.set(k + ".partition", part ? "exact" : "broken");
    m.set(k + ".measure.Xstar", q(st.Xstar.measure()));
    m.set(k + ".measure.Ystar", q(st.Ystar.measure()));
    m.set(k + ".measure.Iprime", q(st.Iprime.measure()));
    m.set(k + ".measure.Jprime", q(st.Jprime.measure()));
    m.set(k + ".rigid_times", joinInts(st.rigidTimes));
    for (const auto* side : {&st.sideR, &st.sideS}) {
      if (!*side) continue;
      const std::string s = k + (side == &st.sideR ? ".rescale.R" : ".rescale.S");
      const auto& r = (*side)->rescaling;
      m.set(s + ".a", q(r.a));
      m.set(s + ".b", q(r.b));
      m.set(s + ".c", q(r.c));
      m.set(s + ".d", q(r.d));
      m.set(s + ".conjugacy", (*side)->conjugacyOk ? "ok" : "failed");
    }
    if (st.sideS) {
      m.set(k + ".measure.E", q(st.E.measure()));
      m.set(k + ".partition_size", std::to_string(st.partitionSize));
    }
    const auto T = st.T();
    m.set(k + ".pieces", std::to_string(T.pieces().size()));
    const auto table = correlationTable(T, A, A, c.horizon.value_or(st.h));
    emitTable(m, c.out, "stage" + std::to_string(st.n), table, "T_" + std::to_string(st.n));
  }
  for (const auto& e : run.ledger) {
    const std::string k = "ledger." + std::to_string(e.n);
    m.set(k + ".muE", q(e.muE));
    m.set(k + ".bound", q(e.bound));
    m.set(k + ".holds", e.ok() ? "true" : "false");
  }
  for (std::size_t i = 0; i < run.chains.size(); ++i) {
    const std::string k = "chain." + std::to_string(i + 1);
    m.set(k + ".ratio", q(run.chains[i].ratio));
    m.set(k + ".ratio_ok", run.chains[i].ratioOk ? "true" : "false");
    m.set(k + ".inclusion_ok", run.chains[i].inclusionOk ? "true" : "false");
    m.set(k + ".distortion_ok", run.chains[i].distortionOk ? "true" : "false");
  }
  m.set("sum.eps", q(run.sumEps));
  m.set("sum.r", q(run.sumR));
  m.set("sum.s", q(run.sumS));
  if (c.delta && run.stages.size() >= 2) {
    const Rational delta = parseRational(*c.delta);
    const auto rep = timed(m, "lemma", [&] { return checkRescalingLemma(run.stages[0], run.stages[1], delta, cfg.h1); });
    m.set("lemma.delta", q(rep.delta));
    m.set("lemma.pairs", std::to_string(rep.pairs));
    m.set("lemma.checks", std::to_string(rep.checks));
    m.set("lemma.worst_slack", q(rep.worstSlack));
  }
  out << "stages: " << run.stages.size() << "\n";
  for (const auto& e : run.ledger) out << "ledger " << e.n << ": " << q(e.muE) << " < " << q(e.bound) << "\n";
}

void cmdReport(const RunConfig& c, std::ostream& out) {
  const auto mf = readManifest(c.out / "manifest.txt");
  long long bad = 0;
  for (const auto& [k, v] : mf.entries) {
    if (k.rfind("artifact.", 0) == 0) {
      const std::string name = k.substr(9);
      const std::string want = v.substr(v.find(' ') + 1);
      const bool ok = sha256File(c.out / name) == want;
      if (!ok) ++bad;
      out << name << ": " << (ok ? "ok" : "digest mismatch") << "\n";
    } else if (k == "status" || k == "subcommand" || k.find("verdict") != std::string::npos ||
               k.rfind("error.", 0) == 0) {
      out << k << ": " << v << "\n";
    }
  }
  if (bad) fail(ErrorKind::Verification, "DigestMismatch", std::to_string(bad) + " artifact(s) changed since the run");
}

}  // namespace

void dispatch(const RunConfig& c, Manifest& m, std::ostream& out) {
  const std::string& s = c.subcommand;
  if (s == "build") return cmdBuild(c, m, out);
  if (s == "correlate") return cmdCorrelate(c, m, out, false);
  if (s == "classify") return cmdCorrelate(c, m, out, true);
  if (s == "construct-overrec") return cmdOverRec(c, m, out);
  if (s == "transfer") return cmdTransfer(c, m, out);
  if (s == "towerplex") return cmdTowerplex(c, m, out);
  if (s == "report") return cmdReport(c, out);
  fail(ErrorKind::Precondition, "BadArguments", "unknown subcommand " + s);
}

}  // namespace ergo::cli
