#include "pitchbench/metrics.h"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace pitchbench {

FrameOutcome ClassifyFrame(double f_est, double f_ref, double norm_rate_hz, double gross_ms) {
  if (!std::isfinite(f_est) || !std::isfinite(f_ref) || f_est < 0.0 || f_ref < 0.0) {
    throw std::invalid_argument("pitch values must be finite and non-negative");
  }
  using Kind = FrameOutcome::Kind;
  const bool est_voiced = f_est > 0.0;
  const bool ref_voiced = f_ref > 0.0;
  if (!ref_voiced) return {est_voiced ? Kind::kUnvoicedToVoiced : Kind::kCorrectUnvoiced, 0.0};
  if (!est_voiced) return {Kind::kVoicedToUnvoiced, 0.0};
  const double period_diff = std::abs(1.0 / f_est - 1.0 / f_ref);
  if (period_diff > gross_ms / 1000.0) return {Kind::kGrossError, 0.0};
  return {Kind::kCorrectVoicedFine, period_diff * norm_rate_hz};
}

std::size_t UtteranceStats::truncated_frames() const {
  return std::max(est_frames, ref_frames) - total_frames;
}

UtteranceStats EvaluatePair(const PitchTrack& est, const PitchTrack& ref, double norm_rate_hz,
                            double gross_ms) {
  if (std::abs(est.hop_seconds - ref.hop_seconds) > kHopMatchTolerance) {
    throw std::invalid_argument("hop mismatch: estimate " + std::to_string(est.hop_seconds) +
                                " s vs reference " + std::to_string(ref.hop_seconds) + " s");
  }
  UtteranceStats s;
  s.est_frames = est.size();
  s.ref_frames = ref.size();
  s.total_frames = std::min(est.size(), ref.size());
  using Kind = FrameOutcome::Kind;
  for (std::size_t i = 0; i < s.total_frames; ++i) {
    const FrameOutcome o = ClassifyFrame(est.f0_hz[i], ref.f0_hz[i], norm_rate_hz, gross_ms);
    if (ref.f0_hz[i] > 0.0) {
      ++s.ref_voiced_frames;
    } else {
      ++s.ref_unvoiced_frames;
    }
    switch (o.kind) {
      case Kind::kCorrectUnvoiced:
        break;
      case Kind::kUnvoicedToVoiced:
        ++s.u2v_errors;
        break;
      case Kind::kVoicedToUnvoiced:
        ++s.v2u_errors;
        break;
      case Kind::kGrossError:
        ++s.both_voiced_frames;
        ++s.gross_errors;
        break;
      case Kind::kCorrectVoicedFine:
        ++s.both_voiced_frames;
        ++s.fine_frames;
        s.fine_errors_samples.push_back(o.err_samples);
        break;
    }
  }
  return s;
}

CorpusStats Aggregate(std::span<const UtteranceStats> stats) {
  if (stats.empty()) throw std::invalid_argument("cannot aggregate an empty set of utterances");
  CorpusStats c;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : stats) {
    c.total_frames += s.total_frames;
    c.ref_unvoiced_frames += s.ref_unvoiced_frames;
    c.ref_voiced_frames += s.ref_voiced_frames;
    c.both_voiced_frames += s.both_voiced_frames;
    c.u2v_errors += s.u2v_errors;
    c.v2u_errors += s.v2u_errors;
    c.gross_errors += s.gross_errors;
    c.fine_frames += s.fine_frames;
    for (double e : s.fine_errors_samples) sum += e;
    n += s.fine_errors_samples.size();
  }
  if (n > 0) {
    c.mean_fine_samples = sum / static_cast<double>(n);
    double sq = 0.0;
    for (const auto& s : stats) {
      for (double e : s.fine_errors_samples) {
        const double d = e - c.mean_fine_samples;
        sq += d * d;
      }
    }
    c.stdev_fine_samples = std::sqrt(sq / static_cast<double>(n));
  }
  c.u2v_pct_defined = c.ref_unvoiced_frames > 0;
  c.v2u_pct_defined = c.ref_voiced_frames > 0;
  if (c.u2v_pct_defined) {
    c.u2v_pct = 100.0 * static_cast<double>(c.u2v_errors) / static_cast<double>(c.ref_unvoiced_frames);
  }
  if (c.v2u_pct_defined) {
    c.v2u_pct = 100.0 * static_cast<double>(c.v2u_errors) / static_cast<double>(c.ref_voiced_frames);
  }
  return c;
}

int BinRank(double value, double first, double second) {
  if (value < first) return 1;
  if (value < second) return 2;
  return 3;
}

FomScore FomRank(const CorpusStats& corpus) {
  FomScore f;
  f.rank_u2v = BinRank(corpus.u2v_pct, 8.0, 16.0);
  f.rank_v2u = BinRank(corpus.v2u_pct, 8.0, 16.0);
  f.rank_mean_fine = BinRank(corpus.mean_fine_samples, 0.5, 1.0);
  f.rank_stdev_fine = BinRank(corpus.stdev_fine_samples, 8.0, 16.0);
  f.total = f.rank_u2v + f.rank_v2u + f.rank_mean_fine + f.rank_stdev_fine;
  return f;
}

std::vector<HistogramBin> PitchHistogram(const PitchTrack& ref, double bin_width_hz) {
  if (!(bin_width_hz > 0.0)) throw std::invalid_argument("histogram bin width must be positive");
  std::map<long long, std::size_t> counts;
  for (double f : ref.f0_hz) {
    if (f > 0.0) ++counts[static_cast<long long>(std::floor(f / bin_width_hz))];
  }
  std::vector<HistogramBin> bins;
  bins.reserve(counts.size());
  for (const auto& [index, count] : counts) {
    bins.push_back({static_cast<double>(index) * bin_width_hz, count});
  }
  return bins;
}

nlohmann::json StatsToJson(const CorpusStats& c, const FomScore& fom) {
  return nlohmann::json{
      {"total_frames", c.total_frames},
      {"ref_unvoiced_frames", c.ref_unvoiced_frames},
      {"ref_voiced_frames", c.ref_voiced_frames},
      {"both_voiced_frames", c.both_voiced_frames},
      {"u2v_errors", c.u2v_errors},
      {"v2u_errors", c.v2u_errors},
      {"u2v_pct", c.u2v_pct},
      {"v2u_pct", c.v2u_pct},
      {"gross_errors", c.gross_errors},
      {"fine_frames", c.fine_frames},
      {"mean_fine_samples", c.mean_fine_samples},
      {"stdev_fine_samples", c.stdev_fine_samples},
      {"fom",
       {{"rank_u2v", fom.rank_u2v},
        {"rank_v2u", fom.rank_v2u},
        {"rank_mean_fine", fom.rank_mean_fine},
        {"rank_stdev_fine", fom.rank_stdev_fine},
        {"total", fom.total}}},
  };
}

}  // namespace pitchbench
