#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pitchbench/cli.h"
#include "pitchbench/pyin.h"
#include "pitchbench/trackio.h"
#include "pitchbench/yaapt.h"

namespace pitchbench::cli {

namespace {

// Thrown for problems that must map to the usage exit code after CLI11 has
// accepted the arguments.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EngineOverrides {
  std::optional<double> fmin_hz;
  std::optional<double> fmax_hz;
  std::optional<double> frame_ms;
  std::optional<double> hop_ms;
};

template <typename Config>
Config ApplyOverrides(Config config, const EngineOverrides& o) {
  if (o.fmin_hz) config.fmin_hz = *o.fmin_hz;
  if (o.fmax_hz) config.fmax_hz = *o.fmax_hz;
  if (o.frame_ms) config.frame_len_ms = *o.frame_ms;
  if (o.hop_ms) config.hop_ms = *o.hop_ms;
  return config;
}

void CheckAlgo(const std::string& algo) {
  if (algo == "pyin" || algo == "yaapt") return;
  if (algo == "crepe") {
    throw UsageError(
        "crepe is not built in: run it externally, export time_s,f0_hz,confidence as CSV and "
        "score it with 'evaluate --est' or 'compare --external crepe=<dir>'");
  }
  throw UsageError("unknown algorithm '" + algo + "' (expected pyin or yaapt)");
}

PitchTrack RunEngine(const std::string& algo, const AudioSignal& signal, const EngineOverrides& o) {
  if (algo == "pyin") return PyinTrack(signal, ApplyOverrides(PyinConfig{}, o));
  return YaaptTrack(signal, ApplyOverrides(YaaptConfig{}, o));
}

std::pair<std::string, std::string> SplitLabel(const std::string& spec, const char* flag) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw UsageError(std::string(flag) + " expects label=path, got '" + spec + "'");
  }
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

std::vector<std::string> SplitList(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Exceptions are
// collected per index so the caller can report every failure.
template <typename Fn>
std::vector<std::string> ParallelFor(std::size_t n, unsigned jobs, Fn fn) {
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  return errors;
}

struct DetectArgs {
  std::string algo;
  std::string in;
  std::string out;
  EngineOverrides engine;
};

int CmdDetect(const DetectArgs& a, std::ostream&) {
  CheckAlgo(a.algo);
  const AudioSignal signal = ReadWav(a.in);
  WriteTrack(RunEngine(a.algo, signal, a.engine), a.out);
  return kExitOk;
}

struct EvaluateArgs {
  std::string est;
  std::string ref;
  std::string out;
  double confidence_threshold = kDefaultConfidenceThreshold;
};

int CmdEvaluate(const EvaluateArgs& a, std::ostream&) {
  const PitchTrack est = ReadExternalTrack(a.est, a.confidence_threshold);
  const PitchTrack ref = ReadReferenceTrack(a.ref);
  const UtteranceStats stats = EvaluatePair(est, ref);
  const CorpusStats corpus = Aggregate(std::span<const UtteranceStats>(&stats, 1));
  WriteText(a.out, StatsToJson(corpus, FomRank(corpus)).dump(2) + "\n");
  return kExitOk;
}

struct CompareArgs {
  std::string manifest;
  std::string algos = "pyin,yaapt";
  std::vector<std::string> external;
  std::vector<std::string> stats;
  std::string out;
  double confidence_threshold = kDefaultConfidenceThreshold;
  unsigned jobs = 1;
  EngineOverrides engine;
};

int CmdCompare(const CompareArgs& a, std::ostream&, std::ostream& err) {
  const std::vector<std::string> algos = SplitList(a.algos);
  for (const auto& algo : algos) CheckAlgo(algo);

  CorpusManifest manifest;
  if (!a.manifest.empty()) manifest = ReadManifest(a.manifest);
  for (const auto& spec : a.external) {
    const auto [label, dir] = SplitLabel(spec, "--external");
    for (auto& e : manifest.entries) {
      e.external[label] = std::filesystem::path(dir) / (e.utterance_id + ".csv");
    }
  }
  if (manifest.entries.empty() && a.stats.empty()) {
    throw UsageError("nothing to compare: the manifest has no entries and no --stats were given");
  }

  const auto missing = MissingFiles(manifest, !algos.empty());
  if (!missing.empty()) {
    err << "missing input files:\n";
    for (const auto& p : missing) err << "  " << p.string() << "\n";
    return kExitError;
  }

  std::vector<std::string> external_labels;
  for (const auto& e : manifest.entries) {
    for (const auto& [label, path] : e.external) {
      if (std::find(external_labels.begin(), external_labels.end(), label) == external_labels.end()) {
        external_labels.push_back(label);
      }
    }
  }
  for (const auto& label : external_labels) {
    for (const auto& e : manifest.entries) {
      if (!e.external.contains(label)) {
        err << "utterance " << e.utterance_id << " has no track for '" << label << "'\n";
        return kExitError;
      }
    }
  }

  const std::size_t n = manifest.entries.size();
  std::vector<CompareRow> rows;
  bool failed = false;
  auto score = [&](const std::string& label, auto make_estimate) {
    std::vector<UtteranceStats> per_utt(n);
    const auto errors = ParallelFor(n, a.jobs, [&](std::size_t i) {
      const auto& e = manifest.entries[i];
      per_utt[i] = EvaluatePair(make_estimate(e), ReadReferenceTrack(e.reference_path));
    });
    for (std::size_t i = 0; i < n; ++i) {
      if (!errors[i].empty()) {
        err << label << " / " << manifest.entries[i].utterance_id << ": " << errors[i] << "\n";
        failed = true;
      }
    }
    if (!failed && n > 0) {
      CompareRow row{label, Aggregate(per_utt), {}};
      row.fom = FomRank(row.stats);
      rows.push_back(std::move(row));
    }
  };

  for (const auto& algo : algos) {
    score(algo, [&](const ManifestEntry& e) { return RunEngine(algo, ReadWav(e.wav_path), a.engine); });
  }
  for (const auto& label : external_labels) {
    score(label, [&](const ManifestEntry& e) {
      return ReadExternalTrack(e.external.at(label), a.confidence_threshold);
    });
  }
  if (failed) return kExitError;

  for (const auto& spec : a.stats) {
    const auto [label, file] = SplitLabel(spec, "--stats");
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file);
    CompareRow row{label, StatsFromJson(nlohmann::json::parse(in)), {}};
    row.fom = FomRank(row.stats);
    rows.push_back(std::move(row));
  }
  WriteCompareCsv(rows, a.out);
  return kExitOk;
}

struct HistArgs {
  std::string ref;
  double bin_hz = 10.0;
  std::string out;
};

int CmdHist(const HistArgs& a, std::ostream&) {
  if (!(a.bin_hz > 0.0)) throw UsageError("--bin-hz must be positive");
  const auto bins = PitchHistogram(ReadReferenceTrack(a.ref), a.bin_hz);
  std::string text = "bin_low_hz,count\n";
  char buf[96];
  for (const auto& b : bins) {
    const int len = std::snprintf(buf, sizeof buf, "%.6g,%zu\n", b.low_hz, b.count);
    text.append(buf, static_cast<std::size_t>(len));
  }
  WriteText(a.out, text);
  return kExitOk;
}

void AddEngineFlags(CLI::App* cmd, EngineOverrides& o) {
  cmd->add_option("--fmin", o.fmin_hz, "Lowest pitch searched (Hz)");
  cmd->add_option("--fmax", o.fmax_hz, "Highest pitch searched (Hz)");
  cmd->add_option("--frame-ms", o.frame_ms, "Analysis frame length (ms)");
  cmd->add_option("--hop-ms", o.hop_ms, "Frame hop (ms)");
}

}  // namespace

void WriteCompareCsv(const std::vector<CompareRow>& rows, const std::filesystem::path& path) {
  std::string text =
      "pda,total_frames,unvoiced_frames,u2v_pct,voiced_frames,v2u_pct,gross_errors,fine_frames,"
      "mean_fine,stdev_fine,fom\n";
  char buf[512];
  for (const auto& r : rows) {
    const auto& s = r.stats;
    const int len = std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.2f,%zu,%.2f,%zu,%zu,%.4f,%.4f,%d\n",
                                  r.pda.c_str(), s.total_frames, s.correct_unvoiced_frames(),
                                  s.u2v_pct, s.both_voiced_frames, s.v2u_pct, s.gross_errors,
                                  s.fine_frames, s.mean_fine_samples, s.stdev_fine_samples,
                                  r.fom.total);
    text.append(buf, static_cast<std::size_t>(len));
  }
  WriteText(path, text);
}

CorpusStats StatsFromJson(const nlohmann::json& doc) {
  CorpusStats c;
  c.total_frames = doc.at("total_frames").get<std::size_t>();
  c.ref_unvoiced_frames = doc.at("ref_unvoiced_frames").get<std::size_t>();
  c.ref_voiced_frames = doc.at("ref_voiced_frames").get<std::size_t>();
  c.both_voiced_frames = doc.at("both_voiced_frames").get<std::size_t>();
  c.u2v_errors = doc.at("u2v_errors").get<std::size_t>();
  c.v2u_errors = doc.at("v2u_errors").get<std::size_t>();
  c.u2v_pct = doc.at("u2v_pct").get<double>();
  c.v2u_pct = doc.at("v2u_pct").get<double>();
  c.gross_errors = doc.at("gross_errors").get<std::size_t>();
  c.fine_frames = doc.at("fine_frames").get<std::size_t>();
  c.mean_fine_samples = doc.at("mean_fine_samples").get<double>();
  c.stdev_fine_samples = doc.at("stdev_fine_samples").get<double>();
  if (c.u2v_errors > c.ref_unvoiced_frames || c.v2u_errors > c.ref_voiced_frames) {
    throw FormatError("statistics: voicing error count exceeds its reference frame count");
  }
  c.u2v_pct_defined = c.ref_unvoiced_frames > 0;
  c.v2u_pct_defined = c.ref_voiced_frames > 0;
  return c;
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pitch tracking and pitch-track evaluation toolkit", "pitchbench"};
  app.require_subcommand(1);

  DetectArgs detect;
  auto* detect_cmd = app.add_subcommand("detect", "Run a built-in tracker on a WAV file");
  detect_cmd->add_option("--algo", detect.algo, "pyin or yaapt")->required();
  detect_cmd->add_option("--in", detect.in, "Input WAV")->required();
  detect_cmd->add_option("--out", detect.out, "Output track CSV")->required();
  AddEngineFlags(detect_cmd, detect.engine);

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score one track against its reference");
  evaluate_cmd->add_option("--est", evaluate.est, "Estimated track CSV")->required();
  evaluate_cmd->add_option("--ref", evaluate.ref, "Reference pitch text file")->required();
  evaluate_cmd->add_option("--out", evaluate.out, "Output statistics JSON")->required();
  evaluate_cmd->add_option("--confidence-threshold", evaluate.confidence_threshold,
                           "Frames below this confidence count as unvoiced")
      ->capture_default_str();

  CompareArgs compare;
  compare.jobs = DefaultJobs();
  auto* compare_cmd = app.add_subcommand("compare", "Corpus comparison report");
  compare_cmd->add_option("--manifest", compare.manifest, "Corpus manifest CSV");
  compare_cmd->add_option("--algos", compare.algos, "Comma-separated built-in trackers")
      ->capture_default_str();
  compare_cmd->add_option("--external", compare.external,
                          "label=dir with <utterance_id>.csv tracks (repeatable)");
  compare_cmd->add_option("--stats", compare.stats,
                          "label=file with precomputed statistics JSON (repeatable)");
  compare_cmd->add_option("--out", compare.out, "Output report CSV")->required();
  compare_cmd->add_option("--confidence-threshold", compare.confidence_threshold)
      ->capture_default_str();
  compare_cmd->add_option("--jobs", compare.jobs, "Worker threads (default $PITCHBENCH_JOBS or 1)")
      ->check(CLI::PositiveNumber);
  AddEngineFlags(compare_cmd, compare.engine);

  HistArgs hist;
  auto* hist_cmd = app.add_subcommand("hist", "Histogram of voiced reference pitch values");
  hist_cmd->add_option("--ref", hist.ref, "Reference pitch text file")->required();
  hist_cmd->add_option("--bin-hz", hist.bin_hz, "Bin width (Hz)")->capture_default_str();
  hist_cmd->add_option("--out", hist.out, "Output CSV")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*detect_cmd) return CmdDetect(detect, out);
    if (*evaluate_cmd) return CmdEvaluate(evaluate, out);
    if (*compare_cmd) return CmdCompare(compare, out, err);
    if (*hist_cmd) return CmdHist(hist, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace pitchbench::cli
