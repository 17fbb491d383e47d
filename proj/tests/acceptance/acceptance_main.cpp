// Acceptance suite: one line per criterion, PASS / FAIL / SKIP, exit status
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "corpus_fixture.h"
#include "path_oracles.h"
#include "pitchbench/cli.h"
#include "pitchbench/metrics.h"
#include "pitchbench/pyin.h"
#include "pitchbench/signal.h"
#include "pitchbench/trackio.h"
#include "pitchbench/yaapt.h"
#include "temp_dir.h"
#include "test_signals.h"

namespace pb = pitchbench;
namespace pt = pitchbench::testing;

namespace {

// Pinned tolerances and budgets.
constexpr double kFineErrTarget = 3.81;
constexpr double kFineErrTol = 0.01;
constexpr double kOracleRelTol = 1e-9;
constexpr double kDpCostTol = 1e-12;
constexpr double kViterbiLogTol = 1e-9;
constexpr double kRoundTripRelTol = 1e-4;
constexpr double kMinFineFraction = 0.95;
constexpr double kMaxMeanFineSamples = 4.0;
constexpr double kMinSilenceUnvoiced = 0.99;
constexpr std::size_t kInteriorMarginFrames = 5;
constexpr double kOctaveJumpLog2 = 0.5;

struct Outcome {
  enum class Status { kPass, kFail, kSkip } status;
  std::string detail;
};

Outcome Pass(std::string d) { return {Outcome::Status::kPass, std::move(d)}; }
Outcome Fail(std::string d) { return {Outcome::Status::kFail, std::move(d)}; }
Outcome Skip(std::string d) { return {Outcome::Status::kSkip, std::move(d)}; }
Outcome Check(bool ok, std::string d) { return ok ? Pass(std::move(d)) : Fail(std::move(d)); }

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

pb::CorpusStats Row(double u2v, double v2u, double mean, double stdev) {
  pb::CorpusStats c;
  c.u2v_pct = u2v;
  c.v2u_pct = v2u;
  c.mean_fine_samples = mean;
  c.stdev_fine_samples = stdev;
  c.u2v_pct_defined = c.v2u_pct_defined = true;
  return c;
}

Outcome FomReproduction() {
  const int crepe = pb::FomRank(Row(7, 19, 0.96, 7.44)).total;
  const int yaapt = pb::FomRank(Row(6, 4, 0.29, 12.42)).total;
  const int pyin = pb::FomRank(Row(13, 14, 0.44, 6.18)).total;
  return Check(crepe == 7 && yaapt == 5 && pyin == 6,
               Format("CREPE %d (7), YAAPT %d (5), pYIN %d (6)", crepe, yaapt, pyin));
}

Outcome TableIdentity() {
  const struct {
    const char* pda;
    std::size_t voiced, gross, fine;
  } rows[] = {{"CREPE", 2783, 3, 2780}, {"YAAPT", 3177, 0, 3177}, {"pYIN", 2890, 0, 2890}};
  std::string detail;
  bool ok = true;
  for (const auto& r : rows) {
    pb::UtteranceStats s;
    s.both_voiced_frames = r.voiced;
    s.gross_errors = r.gross;
    s.fine_frames = r.fine;
    ok &= s.both_voiced_frames - s.gross_errors == s.fine_frames;
    detail += Format("%s %zu-%zu=%zu ", r.pda, r.voiced, r.gross, r.fine);
  }
  return Check(ok, detail);
}

Outcome MetricOracle() {
  std::mt19937 rng(1001);
  std::uniform_real_distribution<double> f(50.0, 450.0);
  std::uniform_real_distribution<double> jitter(-0.15, 0.15);
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n_est = 1 + rng() % 2000;
    const std::size_t n_ref = 1 + rng() % 2000;
    const double p_voiced = 0.2 + 0.6 * (rng() % 100) / 100.0;
    std::bernoulli_distribution voiced(p_voiced);
    pb::PitchTrack est, ref;
    for (std::size_t i = 0; i < n_ref; ++i) ref.f0_hz.push_back(voiced(rng) ? f(rng) : 0.0);
    for (std::size_t i = 0; i < n_est; ++i) {
      const double r = i < n_ref ? ref.f0_hz[i] : 0.0;
      est.f0_hz.push_back(!voiced(rng) ? 0.0 : (r > 0.0 && rng() % 2 ? r * (1 + jitter(rng)) : f(rng)));
    }
    const pb::UtteranceStats s = pb::EvaluatePair(est, ref);
    std::size_t total = 0, ru = 0, rv = 0, bv = 0, u2v = 0, v2u = 0, gross = 0, fine = 0;
    for (std::size_t i = 0; i < std::min(n_est, n_ref); ++i) {
      const double e = est.f0_hz[i], r = ref.f0_hz[i];
      ++total;
      if (r == 0.0) {
        ++ru;
        if (e > 0.0) ++u2v;
      } else {
        ++rv;
        if (e == 0.0) {
          ++v2u;
        } else {
          ++bv;
          if (std::abs(1.0 / e - 1.0 / r) > 0.001) {
            ++gross;
          } else {
            ++fine;
          }
        }
      }
    }
    const bool same = s.total_frames == total && s.ref_unvoiced_frames == ru &&
                      s.ref_voiced_frames == rv && s.both_voiced_frames == bv &&
                      s.u2v_errors == u2v && s.v2u_errors == v2u && s.gross_errors == gross &&
                      s.fine_frames == fine;
    if (!same) ++mismatches;
  }
  return Check(mismatches == 0, Format("1000 pairs, %zu mismatches", mismatches));
}

Outcome ClassificationBoundary() {
  using Kind = pb::FrameOutcome::Kind;
  const bool a = pb::ClassifyFrame(100, 50).kind == Kind::kGrossError;
  const bool b = pb::ClassifyFrame(50, 100).kind == Kind::kGrossError;
  const pb::FrameOutcome c = pb::ClassifyFrame(200, 210);
  const bool c_ok = c.kind == Kind::kCorrectVoicedFine && std::abs(c.err_samples - kFineErrTarget) <= kFineErrTol;
  // Periods of 2 ms and 1 ms: exactly 1 ms apart, both exactly representable.
  const bool d = pb::ClassifyFrame(500, 1000).kind == Kind::kCorrectVoicedFine;
  return Check(a && b && c_ok && d,
               Format("(100,50) gross=%d (50,100) gross=%d (200,210) err=%.4f 1ms-fine=%d", a, b,
                      c.err_samples, d));
}

Outcome SignalOracles() {
  std::mt19937 rng(1002);
  double worst_yin = 0.0, worst_nccf = 0.0;
  bool cmnd_ok = true;
  auto rel = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 256 + rng() % 1792;
    const std::size_t max_lag = 1 + rng() % (n / 2 - 1);
    const auto x = pt::RandomFrame(rng, n);
    const pb::LagCurve d = pb::YinDifference(x, max_lag);
    const auto d_want = pt::BruteYinDifference(x, max_lag);
    for (std::size_t t = 0; t <= max_lag; ++t) worst_yin = std::max(worst_yin, rel(d.at(t), d_want[t]));
    const std::size_t min_lag = 1 + rng() % max_lag;
    const pb::LagCurve r = pb::Nccf(x, min_lag, max_lag);
    const auto r_want = pt::BruteNccf(x, min_lag, max_lag);
    for (std::size_t k = 0; k < r_want.size(); ++k) worst_nccf = std::max(worst_nccf, rel(r.values[k], r_want[k]));
    cmnd_ok &= pb::Cmnd(d).at(0) == 1.0;
  }
  return Check(worst_yin <= kOracleRelTol && worst_nccf <= kOracleRelTol && cmnd_ok,
               Format("max rel err yin %.2e nccf %.2e, cmnd(0)=1 %s", worst_yin, worst_nccf,
                      cmnd_ok ? "always" : "violated"));
}

struct QualityTally {
  std::size_t interior_voiced = 0;
  std::size_t interior_fine = 0;
  double fine_err_sum = 0.0;
  std::size_t silence = 0;
  std::size_t silence_unvoiced = 0;
  std::size_t octave_jumps = 0;
};

void Score(const pb::PitchTrack& est, const pb::PitchTrack& ref, std::size_t tone_first,
           std::size_t tone_last, QualityTally& q) {
  const std::size_t n = std::min(est.size(), ref.size());
  for (std::size_t k = 0; k < n; ++k) {
    const bool in_tone = k >= tone_first + kInteriorMarginFrames && k + kInteriorMarginFrames <= tone_last;
    const bool in_silence = k + kInteriorMarginFrames < tone_first || k > tone_last + kInteriorMarginFrames;
    if (in_tone) {
      ++q.interior_voiced;
      const double e = est.f0_hz[k], r = ref.f0_hz[k];
      if (e > 0.0) {
        const double dt = std::abs(1.0 / e - 1.0 / r);
        if (dt <= 0.001) {
          ++q.interior_fine;
          q.fine_err_sum += dt * 16000.0;
        }
      }
      if (k > 0 && est.f0_hz[k - 1] > 0.0 && e > 0.0 &&
          k - 1 >= tone_first + kInteriorMarginFrames &&
          std::abs(std::log2(e / est.f0_hz[k - 1])) > kOctaveJumpLog2) {
        ++q.octave_jumps;
      }
    }
    if (in_silence) {
      ++q.silence;
      if (est.f0_hz[k] == 0.0) ++q.silence_unvoiced;
    }
  }
}

Outcome SyntheticQuality() {
  const double rate = 48000.0;
  const auto n_pad = static_cast<std::size_t>(0.4 * rate);
  const auto n_tone = static_cast<std::size_t>(1.0 * rate);
  QualityTally pyin, yaapt;
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 20; ++i) {
    // Log-spaced over the reference corpus's observed pitch range.
    const double f0 = 81.8 * std::pow(328.3 / 81.8, i / 19.0);
    const int kind = i % 3;
    const auto x = pt::Concat({pt::Zeros(n_pad), pt::ToneOfKind(kind, f0, rate, n_tone), pt::Zeros(n_pad)});
    const pb::AudioSignal s(x, rate);
    const pb::PitchTrack ref = pt::ReferenceFor(x.size(), n_pad, n_pad + n_tone, rate, f0);
    std::size_t first = ref.size(), last = 0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      if (ref.voiced(k)) {
        first = std::min(first, k);
        last = k;
      }
    }
    Score(pb::PyinTrack(s, {}), ref, first, last, pyin);
    Score(pb::YaaptTrack(s, {}), ref, first, last, yaapt);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto ok = [](const QualityTally& q) {
    const double fine = static_cast<double>(q.interior_fine) / static_cast<double>(q.interior_voiced);
    const double mean = q.interior_fine ? q.fine_err_sum / static_cast<double>(q.interior_fine) : 0.0;
    const double sil = static_cast<double>(q.silence_unvoiced) / static_cast<double>(q.silence);
    return fine >= kMinFineFraction && mean <= kMaxMeanFineSamples && sil >= kMinSilenceUnvoiced &&
           q.octave_jumps == 0;
  };
  auto describe = [](const char* name, const QualityTally& q) {
    return Format("%s fine %.1f%% mean %.3f smp silence-unvoiced %.1f%% jumps %zu", name,
                  100.0 * q.interior_fine / q.interior_voiced,
                  q.interior_fine ? q.fine_err_sum / q.interior_fine : 0.0,
                  100.0 * q.silence_unvoiced / q.silence, q.octave_jumps);
  };
  return Check(ok(pyin) && ok(yaapt) && seconds < 60.0,
               describe("pyin", pyin) + "; " + describe("yaapt", yaapt) + Format("; %.1f s", seconds));
}

Outcome DecoderOptimality() {
  std::mt19937 rng(1003);
  std::uniform_real_distribution<double> freq(60.0, 400.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const pb::PyinConfig pyin_config;
  const pb::PyinHmm hmm(pyin_config);
  const pb::YaaptConfig yaapt_config;
  std::size_t pyin_bad = 0, yaapt_bad = 0;
  const int instances = 500;
  for (int rep = 0; rep < instances; ++rep) {
    const std::size_t frames = 1 + rng() % 8;
    // pYIN: up to 3 candidates per frame; a frame's candidates often share
    // an octave family to make the decision non-trivial.
    std::vector<pb::CandidateSet> sets(frames);
    std::vector<std::vector<double>> obs;
    for (auto& set : sets) {
      const int n = static_cast<int>(rng() % 4);
      double left = 1.0;
      const double base = freq(rng) / 2;
      for (int i = 0; i < n; ++i) {
        const double p = left * unit(rng);
        set.push_back({rng() % 2 ? base * (1 + i) : freq(rng), p});
        left -= p;
      }
      obs.push_back(hmm.Observation(set));
    }
    const auto path = hmm.Decode(obs);
    if (std::abs(pt::PyinPathLogScore(hmm, obs, path) - pt::PyinBestLogScore(hmm, obs)) > kViterbiLogTol) {
      ++pyin_bad;
    }
    // The public decoder reports the chosen bins' frequencies.
    const pb::PitchTrack track = pb::PyinViterbi(sets, pyin_config);
    for (std::size_t t = 0; t < frames; ++t) {
      const bool voiced = path[t] != pb::PyinHmm::kUnvoiced;
      if (voiced != track.voiced(t) || (voiced && hmm.BinOf(track.f0_hz[t]) + 1 != path[t])) {
        ++pyin_bad;
        break;
      }
    }

    std::vector<pb::YaaptCandidateSet> cands(frames);
    pb::SpectralTrack spectral;
    for (auto& set : cands) {
      const int n = static_cast<int>(rng() % 4);
      for (int i = 0; i < n; ++i) set.push_back({freq(rng), unit(rng)});
      const double nlfer = 2.0 * unit(rng);
      spectral.nlfer.push_back(nlfer);
      spectral.coarse_f0_hz.push_back(nlfer < yaapt_config.nlfer_threshold ? 0.0 : freq(rng));
    }
    const pb::PitchTrack chosen = pb::YaaptDpSelect(cands, spectral, yaapt_config);
    if (std::abs(pt::YaaptTrackCost(yaapt_config, cands, spectral, chosen) -
                 pt::YaaptBestCost(yaapt_config, cands, spectral)) > kDpCostTol) {
      ++yaapt_bad;
    }
  }
  return Check(pyin_bad == 0 && yaapt_bad == 0,
               Format("%d instances each: viterbi non-optimal %zu, dp non-optimal %zu", instances,
                      pyin_bad, yaapt_bad));
}

Outcome DeterminismAndRoundTrip() {
  pt::TempDir dir;
  const auto x = pt::Concat({pt::Zeros(8000), pt::Sawtooth(170.0, 16000.0, 16000), pt::Zeros(8000)});
  pb::WriteWav(pb::AudioSignal(x, 16000.0), dir / "in.wav");
  bool identical = true;
  for (const char* algo : {"pyin", "yaapt"}) {
    std::string first;
    for (int run = 0; run < 3; ++run) {
      const auto out = dir / ("run" + std::to_string(run) + ".csv");
      std::ostringstream o, e;
      if (pb::cli::Run({"pitchbench", "detect", "--algo", algo, "--in", (dir / "in.wav").string(),
                        "--out", out.string()},
                       o, e) != pb::cli::kExitOk) {
        return Fail(std::string("detect failed: ") + e.str());
      }
      const std::string text = pt::ReadText(out);
      if (run == 0) {
        first = text;
      } else {
        identical &= text == first;
      }
    }
  }
  std::mt19937 rng(1004);
  std::uniform_real_distribution<double> f(60.0, 400.0);
  pb::PitchTrack t;
  for (int i = 0; i < 100; ++i) t.f0_hz.push_back(rng() % 3 ? f(rng) : 0.0);
  pb::WriteTrack(t, dir / "t.csv");
  const pb::PitchTrack r = pb::ReadExternalTrack(dir / "t.csv");
  bool round_trip = r.size() == t.size();
  double worst = 0.0;
  for (std::size_t i = 0; round_trip && i < t.size(); ++i) {
    round_trip &= r.voiced(i) == t.voiced(i);
    if (t.voiced(i)) worst = std::max(worst, std::abs(r.f0_hz[i] - t.f0_hz[i]) / t.f0_hz[i]);
  }
  round_trip &= worst <= kRoundTripRelTol;
  return Check(identical && round_trip,
               Format("detect byte-identical %s; round trip voicing %s, max rel f0 err %.1e",
                      identical ? "yes" : "no", round_trip ? "exact" : "differs", worst));
}

// Runs when PITCHBENCH_GRAZ_MANIFEST names a manifest of the reference
// corpus (utterance_id,wav_path,reference_path); the F01 entry is the one
// whose id contains "F01".
Outcome CorpusCheck() {
  const char* env = std::getenv("PITCHBENCH_GRAZ_MANIFEST");
  if (env == nullptr || *env == '\0') return Skip("set PITCHBENCH_GRAZ_MANIFEST to run");
  const std::filesystem::path manifest_path(env);
  const pb::cli::CorpusManifest manifest = pb::cli::ReadManifest(manifest_path);
  const pb::cli::ManifestEntry* f01 = nullptr;
  for (const auto& e : manifest.entries) {
    if (e.utterance_id.find("F01") != std::string::npos) f01 = &e;
  }
  if (f01 == nullptr) return Fail("no F01 utterance in the manifest");
  const pb::TrackSummary s = pb::Summarize(pb::ReadReferenceTrack(f01->reference_path));
  auto tenth = [](double v) { return std::round(v * 10.0) / 10.0; };
  const bool stats_ok = s.voiced_frames == 168 && tenth(s.min_hz) == 81.8 &&
                        tenth(s.median_hz) == 188.5 && tenth(s.max_hz) == 284.6;

  pt::TempDir dir;
  std::ostringstream o, e;
  const std::vector<std::string> args = {
      "pitchbench", "compare", "--manifest", manifest_path.string(), "--out",
      (dir / "report.csv").string(), "--jobs",
      std::to_string(std::max(1U, std::thread::hardware_concurrency()))};
  const int code = pb::cli::Run(args, o, e);
  std::size_t rows = 0;
  if (code == 0) {
    std::istringstream in(pt::ReadText(dir / "report.csv"));
    std::string line;
    while (std::getline(in, line)) ++rows;
  }
  const bool report_ok = code == 0 && manifest.entries.size() == 20 && rows == 3;
  return Check(stats_ok && report_ok,
               Format("F01 voiced %zu min %.1f median %.1f max %.1f; compare exit %d over %zu "
                      "utterances, %zu report lines",
                      s.voiced_frames, s.min_hz, s.median_hz, s.max_hz, code,
                      manifest.entries.size(), rows));
}

}  // namespace

int main() {
  const struct {
    int id;
    const char* name;
    std::function<Outcome()> run;
  } criteria[] = {
      {1, "FOM reproduction of the published rows", FomReproduction},
      {2, "Fine = Voiced - Gross on the published rows", TableIdentity},
      {3, "Metric engine equals re-count oracle", MetricOracle},
      {4, "Frame classification boundaries", ClassificationBoundary},
      {5, "Signal-core brute-force oracles", SignalOracles},
      {6, "Synthetic corpus quality, both engines", SyntheticQuality},
      {7, "Viterbi and DP optimality", DecoderOptimality},
      {8, "Determinism and track round trip", DeterminismAndRoundTrip},
      {9, "Reference corpus check", CorpusCheck},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = Fail(std::string("exception: ") + e.what());
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.status == Outcome::Status::kPass   ? "PASS"
                      : o.status == Outcome::Status::kSkip ? "SKIP"
                                                           : "FAIL";
    if (o.status == Outcome::Status::kFail) ++failures;
    std::printf("[%s] %d. %s: %s (%.0f ms)\n", tag, c.id, c.name, o.detail.c_str(), ms);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
