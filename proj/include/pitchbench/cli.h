#pragma once

// Batch front end: detect, evaluate, compare, hist.
// Exit codes: 0 success, 1 runtime/data error, 2 usage error.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pitchbench/metrics.h"

namespace pitchbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

struct ManifestEntry {
  std::string utterance_id;
  std::filesystem::path wav_path;
  std::filesystem::path reference_path;
  // External track CSV per tracker label.
  std::map<std::string, std::filesystem::path> external;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
};

/// CSV manifest with header "utterance_id,wav_path,reference_path" and any
/// number of extra "external:<label>" columns. Relative paths resolve
/// against the manifest's directory. Entries come back sorted by id.
CorpusManifest ReadManifest(const std::filesystem::path& path);

/// Paths named by the manifest that do not exist. Audio paths are only
/// checked when `need_audio` is set.
std::vector<std::filesystem::path> MissingFiles(const CorpusManifest& manifest, bool need_audio);

struct CompareRow {
  std::string pda;
  CorpusStats stats;
  FomScore fom;
};

/// Table-style report. unvoiced_frames counts frames both tracks leave
/// unvoiced and voiced_frames counts frames both tracks voice, so
/// fine_frames = voiced_frames - gross_errors on every row.
void WriteCompareCsv(const std::vector<CompareRow>& rows, const std::filesystem::path& path);

/// Inverse of StatsToJson, for precomputed corpus statistics.
CorpusStats StatsFromJson(const nlohmann::json& doc);

/// Worker count from PITCHBENCH_JOBS, or 1.
unsigned DefaultJobs();

/// `args` includes the program name at index 0.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pitchbench::cli
