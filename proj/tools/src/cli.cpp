#include "ergo_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include "ergo/rational.hpp"

namespace ergo::cli {

int exitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Precondition: return 2;
    case ErrorKind::Verification: return 3;
    case ErrorKind::PartiallyUndefined:
    case ErrorKind::StageExhausted: return 4;
  }
  return 1;
}

namespace {

const char* kindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Verification: return "verification";
    case ErrorKind::PartiallyUndefined: return "partially-undefined";
    case ErrorKind::StageExhausted: return "stage-exhaustion";
  }
  return "internal";
}

void report(std::ostream& err, Manifest& m, const RunConfig& cfg, const std::string& kind, const std::string& name,
            const std::string& what, int code) {
  nlohmann::ordered_json rec;
  rec["error"] = {{"kind", kind}, {"name", name}, {"message", what}, {"exit", code}, {"subcommand", cfg.subcommand}};
  err << rec.dump() << "\n";
  m.set("status", "error");
  m.set("error.kind", kind);
  m.set("error.name", name);
  m.set("error.message", what);
  m.set("exit", std::to_string(code));
}

void requireRational(const std::optional<std::string>& v, const char* flag) {
  if (v) {
    try {
      parseRational(*v);
    } catch (const Error&) {
      fail(ErrorKind::Precondition, "BadRational", std::string(flag) + " expects p/q with q > 0, got `" + *v + "`");
    }
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Exact experiments on cut-and-stack transformations", "ergolab"};
  app.set_help_flag("--help", "print usage");
  app.set_config("--config", "", "flat `key = value` file; command-line flags win");
  app.require_subcommand(1, 1);

  app.add_option("--recipe", cfg.recipe, "built-in recipe name or recipe file");
  app.add_option("--stage", cfg.stage, "builder stage");
  app.add_option("--target-recipe", cfg.targetRecipe, "transfer target recipe");
  app.add_option("--target-stage", cfg.targetStage, "transfer target stage");
  app.add_option("--set", cfg.set, "interval set, e.g. 0/1:1/2,3/4:1/1");
  app.add_option("--set-b", cfg.setB, "second set for cross-correlations (defaults to --set)");
  app.add_option("--horizon", cfg.horizon, "largest n");
  app.add_option("--eps", cfg.eps, "tolerance p/q, or geometric:<ratio> for towerplex");
  app.add_option("--delta", cfg.delta, "rescaling-lemma δ for towerplex");
  app.add_option("--a", cfg.a, "target measure budget for construct-overrec");
  app.add_option("--stages", cfg.stages, "number of construction stages");
  app.add_option("--window", cfg.window, "verified window multiplier W");
  app.add_option("--max-scan", cfg.maxScan, "largest |n| scanned for a mixing scale");
  app.add_option("--h", cfg.h, "tower height for transfer");
  app.add_option("--h1", cfg.h1, "towerplex h_1");
  app.add_option("--kappa", cfg.kappa, "towerplex ledger constant κ");
  app.add_option("--seed-R", cfg.seedR, "towerplex seed recipe for R");
  app.add_option("--seed-S", cfg.seedS, "towerplex seed recipe for S");
  app.add_option("--seed-R-stage", cfg.seedRStage, "builder stage for the R seed");
  app.add_option("--seed-S-stage", cfg.seedSStage, "builder stage for the S seed");
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();

  const std::pair<const char*, const char*> subcommands[] = {
      {"build", "build a recipe stage and write its map"},
      {"correlate", "exact correlations of two sets up to --horizon"},
      {"classify", "recurrence verdict of one set up to --horizon"},
      {"construct-overrec", "build a strictly over-recurrent set on a staged map"},
      {"transfer", "move a set into a target transformation and classify it"},
      {"towerplex", "run the towerplex stages and check the ledger"},
      {"report", "verify the digests of an output directory"},
  };
  for (const auto& [name, desc] : subcommands) app.add_subcommand(name, desc)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    Manifest m;
    cfg.subcommand = app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();
    report(err, m, cfg, "precondition", "BadArguments", e.what(), 2);
    return 2;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  for (const CLI::Option* o : app.get_options()) {
    const std::string name = o->get_single_name();
    if (name == "help" || o->count() == 0) continue;
    std::string v;
    for (const auto& r : o->results()) v += (v.empty() ? "" : " ") + r;
    cfg.echo.emplace_back(name, v);
  }

  Manifest m;
  m.set("tool", "ergolab");
  m.set("subcommand", cfg.subcommand);
  for (const auto& [k, v] : cfg.echo) m.set("config." + k, v);
  int code = 0;
  try {
    requireRational(cfg.a, "--a");
    requireRational(cfg.delta, "--delta");
    requireRational(cfg.kappa, "--kappa");
    dispatch(cfg, m, out);
    m.set("status", "ok");
    m.set("exit", "0");
  } catch (const Error& e) {
    code = exitCodeFor(e.kind());
    report(err, m, cfg, kindName(e.kind()), e.name(), e.detail(), code);
  } catch (const std::exception& e) {
    code = 1;
    report(err, m, cfg, "internal", "Internal", e.what(), code);
  }
  if (cfg.subcommand != "report") {
    try {
      m.write(cfg.out);
    } catch (const Error& e) {
      err << e.what() << "\n";
      if (code == 0) code = 2;
    }
  }
  return code;
}

}  // namespace ergo::cli
