#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ergo/recurrence.hpp"

namespace ergo::cli {

std::string sha256Hex(const std::string& bytes);
std::string sha256File(const std::filesystem::path& p);

// Line-oriented `key: value` record. Keys keep insertion order so two runs of
// the same config print the same bytes; timing lines are the only exception.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void timing(const std::string& op, double millis);
  // Writes `bytes` under dir/name and records its digest.
  void artifact(const std::filesystem::path& dir, const std::string& name, const std::string& bytes);
  std::string text() const;
  void write(const std::filesystem::path& dir) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::pair<std::string, std::string>> timings_;
  std::vector<std::pair<std::string, std::string>> artifacts_;
};

struct ManifestFile {
  std::vector<std::pair<std::string, std::string>> entries;
};
ManifestFile readManifest(const std::filesystem::path& path);

// n ↦ μ(TⁿA∩A) with the μ(A)² reference line. Blocked entries leave gaps.
std::string correlationSvg(const CorrelationTable& table, const std::string& title);

std::string csvText(const CorrelationTable& table);

}  // namespace ergo::cli
