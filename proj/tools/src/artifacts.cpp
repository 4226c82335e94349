#include "ergo_cli/artifacts.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ergo/errors.hpp"

namespace ergo::cli {

std::string sha256Hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::Verification, "DigestFailed", "SHA-256 computation failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return out.str();
}

std::string sha256File(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorKind::Precondition, "MissingArtifact", "cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256Hex(buf.str());
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}

void Manifest::timing(const std::string& op, double millis) {
  std::ostringstream v;
  v << std::fixed << std::setprecision(3) << millis << " ms";
  timings_.emplace_back("timing." + op, v.str());
}

void Manifest::artifact(const std::filesystem::path& dir, const std::string& name, const std::string& bytes) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  out << bytes;
  if (!out) fail(ErrorKind::Precondition, "WriteFailed", "cannot write " + (dir / name).string());
  artifacts_.emplace_back("artifact." + name, "sha256 " + sha256Hex(bytes));
}

std::string Manifest::text() const {
  std::ostringstream out;
  for (const auto* block : {&entries_, &artifacts_, &timings_})
    for (const auto& [k, v] : *block) out << k << ": " << v << "\n";
  return out.str();
}

void Manifest::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.txt", std::ios::binary);
  out << text();
  if (!out) fail(ErrorKind::Precondition, "WriteFailed", "cannot write " + (dir / "manifest.txt").string());
}

ManifestFile readManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Precondition, "MissingManifest", "cannot read " + path.string());
  ManifestFile m;
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(": ");
    if (colon == std::string::npos) fail(ErrorKind::Precondition, "BadFormat", "manifest line without `: `: " + line);
    m.entries.emplace_back(line.substr(0, colon), line.substr(colon + 2));
  }
  return m;
}

std::string csvText(const CorrelationTable& table) {
  std::ostringstream out;
  table.writeCsv(out);
  return out.str();
}

std::string correlationSvg(const CorrelationTable& table, const std::string& title) {
  const double W = 640, H = 360, left = 56, right = 16, top = 32, bottom = 40;
  const double ref = toDouble(table.A.measure() * table.B.measure());
  double ymax = ref;
  for (const auto& [n, v] : table.values) ymax = std::max(ymax, toDouble(v));
  if (ymax <= 0) ymax = 1;
  ymax *= 1.05;
  const double nmax = table.horizon > 1 ? double(table.horizon) : 2.0;
  auto px = [&](double n) { return left + (n - 1) / (nmax - 1) * (W - left - right); };
  auto py = [&](double y) { return top + (1 - y / ymax) * (H - top - bottom); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << left << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << num(py(0)) << "\" x2=\"" << W - right << "\" y2=\"" << num(py(0))
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << num(py(0))
    << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << left << "\" y=\"" << H - 12 << "\" font-family=\"sans-serif\" font-size=\"11\">n = 1</text>\n";
  s << "<text x=\"" << W - right - 60 << "\" y=\"" << H - 12 << "\" font-family=\"sans-serif\" font-size=\"11\">n = "
    << table.horizon << "</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << num(py(ref)) << "\" x2=\"" << W - right << "\" y2=\"" << num(py(ref))
    << "\" stroke=\"#c0392b\" stroke-dasharray=\"6 4\"/>\n";
  s << "<text x=\"" << W - right - 90 << "\" y=\"" << num(py(ref) - 4)
    << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#c0392b\">μ(A)μ(B)</text>\n";

  // One polyline per run of consecutive exact entries.
  std::string pts;
  long long prev = -1;
  auto flush = [&] {
    if (!pts.empty())
      s << "<polyline fill=\"none\" stroke=\"#2c3e50\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
    pts.clear();
  };
  for (const auto& [n, v] : table.values) {
    if (n != prev + 1) flush();
    if (!pts.empty()) pts += ' ';
    pts += num(px(double(n))) + "," + num(py(toDouble(v)));
    prev = n;
  }
  flush();
  if (table.values.size() == 1) {
    const auto& [n, v] = *table.values.begin();
    s << "<circle cx=\"" << num(px(double(n))) << "\" cy=\"" << num(py(toDouble(v))) << "\" r=\"2.5\" fill=\"#2c3e50\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace ergo::cli
