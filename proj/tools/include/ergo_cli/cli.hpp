#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ergo/errors.hpp"
#include "ergo_cli/artifacts.hpp"

namespace ergo::cli {

struct RunConfig {
  std::string subcommand;
  std::optional<std::string> recipe, targetRecipe, seedR, seedS;
  std::optional<int> stage, targetStage, stages, seedRStage, seedSStage;
  std::optional<std::string> set, setB;
  std::optional<std::string> a, eps, delta, kappa;
  std::optional<long long> horizon, window, maxScan, h, h1;
  std::filesystem::path out = "out";
  std::vector<std::pair<std::string, std::string>> echo;  // verbatim option values, in declaration order
};

// 0 success, 2 precondition, 3 verification, 4 stage exhaustion.
int exitCodeFor(ErrorKind kind);

// Fills the manifest and writes artifacts. Module errors propagate.
void dispatch(const RunConfig& cfg, Manifest& m, std::ostream& out);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ergo::cli
