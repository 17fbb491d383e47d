#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "pitchbench/cli.h"
#include "pitchbench/errors.h"

namespace pitchbench::cli {

namespace {

std::string TrimCopy(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(TrimCopy(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

constexpr std::string_view kExternalPrefix = "external:";

}  // namespace

CorpusManifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path raw(p);
    return raw.is_absolute() ? raw : base / raw;
  };

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!TrimCopy(line).empty()) header = SplitFields(line);
  }
  CorpusManifest manifest;
  if (header.empty()) return manifest;
  if (header.size() < 3 || header[0] != "utterance_id" || header[1] != "wav_path" ||
      header[2] != "reference_path") {
    throw ParseError(path.string(), line_no,
                     "manifest header must start with utterance_id,wav_path,reference_path");
  }
  std::vector<std::string> labels;
  for (std::size_t c = 3; c < header.size(); ++c) {
    if (header[c].rfind(kExternalPrefix, 0) != 0 || header[c].size() == kExternalPrefix.size()) {
      throw ParseError(path.string(), line_no, "unknown manifest column '" + header[c] + "'");
    }
    labels.push_back(header[c].substr(kExternalPrefix.size()));
  }

  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (TrimCopy(line).empty() || TrimCopy(line).front() == '#') continue;
    const auto fields = SplitFields(line);
    if (fields.size() < 3 || fields[0].empty()) {
      throw ParseError(path.string(), line_no, "expected at least 3 fields");
    }
    if (!seen.insert(fields[0]).second) {
      throw ParseError(path.string(), line_no, "duplicate utterance id '" + fields[0] + "'");
    }
    ManifestEntry entry{fields[0], resolve(fields[1]), resolve(fields[2]), {}};
    for (std::size_t c = 3; c < fields.size() && c - 3 < labels.size(); ++c) {
      if (!fields[c].empty()) entry.external[labels[c - 3]] = resolve(fields[c]);
    }
    manifest.entries.push_back(std::move(entry));
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const auto& a, const auto& b) { return a.utterance_id < b.utterance_id; });
  return manifest;
}

std::vector<std::filesystem::path> MissingFiles(const CorpusManifest& manifest, bool need_audio) {
  std::vector<std::filesystem::path> missing;
  for (const auto& e : manifest.entries) {
    if (need_audio && !std::filesystem::exists(e.wav_path)) missing.push_back(e.wav_path);
    if (!std::filesystem::exists(e.reference_path)) missing.push_back(e.reference_path);
    for (const auto& [label, p] : e.external) {
      if (!std::filesystem::exists(p)) missing.push_back(p);
    }
  }
  return missing;
}

unsigned DefaultJobs() {
  if (const char* env = std::getenv("PITCHBENCH_JOBS"); env != nullptr) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace pitchbench::cli
