#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ergo/builders.hpp"
#include "ergo/serialize.hpp"
#include "ergo_cli/cli.hpp"

namespace fs = std::filesystem;
using ergo::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ergolab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path freshDir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ergolab_cli_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string withoutTiming(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("timing.", 0) != 0) out += line + "\n";
  return out;
}

std::string value(const fs::path& manifest, const std::string& key) {
  for (const auto& [k, v] : ergo::cli::readManifest(manifest).entries)
    if (k == key) return v;
  return "";
}

}  // namespace

TEST(Cli, ClassifyOdometerHalves) {
  const auto d = freshDir("classify");
  const auto r = invoke({"classify", "--recipe", "odometer", "--set", "0/1:1/2", "--horizon", "1", "--out", d.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("verdict: strictlyUnderRecurrent"), std::string::npos);
  EXPECT_EQ(value(d / "manifest.txt", "result.margin"), "1/4");
  EXPECT_EQ(value(d / "manifest.txt", "config.recipe"), "odometer");
  EXPECT_TRUE(fs::exists(d / "correlations.svg"));
}

TEST(Cli, CorrelateRotationRows) {
  const auto d = freshDir("correlate");
  const auto r = invoke({"correlate", "--recipe", "rotation2", "--set", "0/1:1/2", "--horizon", "2", "--out", d.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(d / "correlations.csv");
  EXPECT_NE(csv.find("\n1,0,1,"), std::string::npos);
  EXPECT_NE(csv.find("\n2,1,2,"), std::string::npos);
  EXPECT_EQ(csv.find('.'), std::string::npos);
}

TEST(Cli, ManifestDigestsMatchArtifacts) {
  const auto d = freshDir("digest");
  ASSERT_EQ(invoke({"build", "--recipe", "staircase", "--stage", "3", "--out", d.string()}).code, 0);
  EXPECT_EQ(value(d / "manifest.txt", "artifact.map.txt"), "sha256 " + ergo::cli::sha256File(d / "map.txt"));
  EXPECT_EQ(invoke({"report", "--out", d.string()}).code, 0);
  std::ofstream(d / "map.txt", std::ios::app) << "tampered\n";
  const auto r = invoke({"report", "--out", d.string()});
  EXPECT_EQ(r.code, 3);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  // Same --out both times so the echoed config matches byte for byte.
  const auto d = freshDir("det");
  const std::vector<std::string> args{"correlate", "--recipe", "chacon", "--stage", "3", "--set", "0/1:1/3",
                                      "--horizon", "9", "--out", d.string()};
  ASSERT_EQ(invoke(args).code, 0);
  const std::string first = slurp(d / "manifest.txt");
  ASSERT_EQ(invoke(args).code, 0);
  const std::string second = slurp(d / "manifest.txt");
  EXPECT_NE(first.find("timing."), std::string::npos);
  EXPECT_EQ(withoutTiming(second), withoutTiming(first));
}

TEST(Cli, ExitCodesAndErrorRecord) {
  const auto d = freshDir("errors");
  auto r = invoke({"classify", "--recipe", "odometer", "--set", "0/1:1/2", "--a", "1/0", "--out", d.string()});
  EXPECT_EQ(r.code, 2);
  const auto rec = nlohmann::json::parse(r.err);
  EXPECT_EQ(rec["error"]["kind"], "precondition");
  EXPECT_EQ(rec["error"]["exit"], 2);
  EXPECT_EQ(value(d / "manifest.txt", "status"), "error");

  r = invoke({"construct-overrec", "--a", "1/5", "--stages", "2", "--stage", "5", "--out", d.string()});
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"]["name"], "NotFoundWithinStage");
  EXPECT_EQ(value(d / "manifest.txt", "bound.near.holds"), "true");

  r = invoke({"towerplex", "--stages", "2", "--kappa", "1/100", "--out", d.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"]["name"], "LedgerViolation");

  EXPECT_EQ(invoke({"classify", "--bogus"}).code, 2);
  EXPECT_EQ(invoke({"classify", "--out", d.string()}).code, 2);  // missing --recipe
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto d = freshDir("config");
  fs::create_directories(d);
  std::ofstream(d / "run.ini") << "recipe = odometer\nset = 0/1:1/2\nhorizon = 3\n";
  const auto r = invoke({"classify", "--config", (d / "run.ini").string(), "--horizon", "1", "--out", d.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(value(d / "manifest.txt", "config.horizon"), "1");
  EXPECT_EQ(value(d / "manifest.txt", "result.horizon"), "1");
}

TEST(Cli, TowerplexManifest) {
  const auto d = freshDir("towerplex");
  const auto r = invoke({"towerplex", "--stages", "2", "--eps", "geometric:1/4", "--out", d.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(value(d / "manifest.txt", "stage.1.measure.X"), "1/2");
  EXPECT_EQ(value(d / "manifest.txt", "stage.2.partition"), "exact");
  EXPECT_EQ(value(d / "manifest.txt", "ledger.1.holds"), "true");
  EXPECT_TRUE(fs::exists(d / "stage2.csv"));
  EXPECT_EQ(invoke({"towerplex", "--eps", "1/4", "--out", d.string()}).code, 2);
}

TEST(Cli, TransferSubstitute) {
  const auto d = freshDir("transfer");
  const auto src = ergo::buildStage(*ergo::builtinRecipe("staircase"), 2);
  const std::string A = ergo::formatSetSpec(src.levelRange(0, 10));
  const auto r = invoke({"transfer", "--set", A, "--h", "12", "--eps", "1/5", "--out", d.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(value(d / "manifest.txt", "result.verdict"), "epsOverRecurrent(1/5)");
  EXPECT_EQ(value(d / "manifest.txt", "transfer.levels"), "0 1 2 3 4 5 6 7 8 9");
  // μ(A) = 1 is rejected as a precondition.
  EXPECT_EQ(invoke({"transfer", "--set", "0/1:1/1", "--h", "12", "--out", d.string()}).code, 2);
}
