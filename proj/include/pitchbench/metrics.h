#pragma once

// Frame-level error taxonomy, utterance and corpus statistics, and the
// binned figure of merit used to rank pitch trackers.

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "pitchbench/track.h"

namespace pitchbench {

inline constexpr double kNormRateHz = 16000.0;
inline constexpr double kGrossErrorMs = 1.0;

struct FrameOutcome {
  enum class Kind { kCorrectUnvoiced, kCorrectVoicedFine, kGrossError, kUnvoicedToVoiced, kVoicedToUnvoiced };
  Kind kind = Kind::kCorrectUnvoiced;
  // Period error in samples at the normalization rate; only meaningful for
  // kCorrectVoicedFine.
  double err_samples = 0.0;
};

/// Both voiced: the period difference |1/f_est - 1/f_ref| decides; more than
/// gross_ms is a gross error, anything up to and including it is fine.
FrameOutcome ClassifyFrame(double f_est, double f_ref, double norm_rate_hz = kNormRateHz,
                           double gross_ms = kGrossErrorMs);

struct UtteranceStats {
  std::size_t total_frames = 0;
  std::size_t ref_unvoiced_frames = 0;
  std::size_t ref_voiced_frames = 0;
  std::size_t both_voiced_frames = 0;
  std::size_t u2v_errors = 0;
  std::size_t v2u_errors = 0;
  std::size_t gross_errors = 0;
  std::size_t fine_frames = 0;
  std::vector<double> fine_errors_samples;
  // Input lengths before truncation to the shorter track.
  std::size_t est_frames = 0;
  std::size_t ref_frames = 0;

  std::size_t correct_unvoiced_frames() const { return ref_unvoiced_frames - u2v_errors; }
  std::size_t truncated_frames() const;
};

/// Maximum hop difference tolerated between an estimate and its reference.
inline constexpr double kHopMatchTolerance = 1e-6;

/// Compares the first min(len_est, len_ref) frames. Throws
/// std::invalid_argument if the hops differ.
UtteranceStats EvaluatePair(const PitchTrack& est, const PitchTrack& ref,
                            double norm_rate_hz = kNormRateHz, double gross_ms = kGrossErrorMs);

struct CorpusStats {
  std::size_t total_frames = 0;
  std::size_t ref_unvoiced_frames = 0;
  std::size_t ref_voiced_frames = 0;
  std::size_t both_voiced_frames = 0;
  std::size_t u2v_errors = 0;
  std::size_t v2u_errors = 0;
  std::size_t gross_errors = 0;
  std::size_t fine_frames = 0;
  double mean_fine_samples = 0.0;
  double stdev_fine_samples = 0.0;
  double u2v_pct = 0.0;
  double v2u_pct = 0.0;
  // False when the corresponding denominator was zero (pct reported as 0).
  bool u2v_pct_defined = false;
  bool v2u_pct_defined = false;

  std::size_t correct_unvoiced_frames() const { return ref_unvoiced_frames - u2v_errors; }
};

/// Sums counters and pools fine errors across utterances (population
/// standard deviation). Throws std::invalid_argument on empty input.
CorpusStats Aggregate(std::span<const UtteranceStats> stats);

struct FomScore {
  int rank_u2v = 0;
  int rank_v2u = 0;
  int rank_mean_fine = 0;
  int rank_stdev_fine = 0;
  int total = 0;
};

/// Rank of `value` on left-closed bins [0, first), [first, second), [second, inf).
int BinRank(double value, double first, double second);

/// Voicing percentages binned at 8 / 16 %, mean fine error at 0.5 / 1
/// samples, fine-error spread at 8 / 16 samples. Gross errors do not enter.
FomScore FomRank(const CorpusStats& corpus);

struct HistogramBin {
  double low_hz = 0.0;
  std::size_t count = 0;

  bool operator==(const HistogramBin&) const = default;
};

/// Non-empty bins of width `bin_width_hz` over voiced frames, ascending.
std::vector<HistogramBin> PitchHistogram(const PitchTrack& ref, double bin_width_hz = 10.0);

/// Statistics document with the fixed key set used by the CLI.
nlohmann::json StatsToJson(const CorpusStats& corpus, const FomScore& fom);

}  // namespace pitchbench
