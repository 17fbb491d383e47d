#pragma once

// Probabilistic YIN: per-frame pitch candidates with probabilities drawn from
// a prior over YIN thresholds, decoded into a voiced/unvoiced track by an HMM.

#include <cstddef>
#include <span>
#include <vector>

#include "pitchbench/signal.h"
#include "pitchbench/track.h"

namespace pitchbench {

struct PyinConfig {
  double fmin_hz = 60.0;
  double fmax_hz = 400.0;
  double frame_len_ms = 40.0;
  double hop_ms = 10.0;
  int n_thresholds = 100;
  double threshold_prior_mean = 0.1;
  int bins_per_semitone = 5;
  double switch_prob = 0.01;
  double max_transition_semitones = 12.0;

  /// Throws std::invalid_argument on an unusable configuration. Pass the
  /// signal rate to also check the search band against Nyquist.
  void Validate(double sample_rate_hz = 0.0) const;
};

struct PitchCandidate {
  double f0_hz = 0.0;
  double probability = 0.0;
};

using CandidateSet = std::vector<PitchCandidate>;

/// YIN thresholds and their prior weights (weights sum to 1).
struct ThresholdPrior {
  std::vector<double> thresholds;
  std::vector<double> weights;
};

/// Beta-shaped prior with the configured mean over n equally spaced
/// thresholds in (0, 1].
ThresholdPrior MakeThresholdPrior(const PyinConfig& config);

/// Lag search bounds used by the engine for a given rate.
struct LagRange {
  std::size_t min_lag;
  std::size_t max_lag;
};
LagRange PyinLagRange(const PyinConfig& config, double sample_rate_hz);

CandidateSet PyinCandidates(std::span<const double> frame, const PyinConfig& config,
                            double sample_rate_hz);

/// Log-frequency pitch grid plus one unvoiced state. State 0 is unvoiced;
/// state b + 1 is voiced bin b, ordered by increasing frequency, so a lower
/// state index always means a lower frequency.
class PyinHmm {
 public:
  explicit PyinHmm(const PyinConfig& config);

  std::size_t n_bins() const { return n_bins_; }
  std::size_t n_states() const { return n_bins_ + 1; }
  static constexpr std::size_t kUnvoiced = 0;

  double BinFrequency(std::size_t bin) const;
  /// Nearest bin in log frequency, clamped to the grid.
  std::size_t BinOf(double f0_hz) const;

  /// Natural-log transition probability between states; -inf if disallowed.
  double LogTransition(std::size_t from, std::size_t to) const;
  double LogInitial(std::size_t state) const;

  /// Per-state observation probabilities for one frame: voiced bins get the
  /// summed probability of the candidates nearest to them, the unvoiced state
  /// gets the residual mass 1 - sum(p).
  std::vector<double> Observation(const CandidateSet& candidates) const;

  /// Log emission for a state given its observation value. The unvoiced
  /// state stands in for a twin of every pitch bin, so its emission carries
  /// the same stay-in-place weight 1 / (max_jump_bins + 1) that an interior
  /// voiced bin pays through its transition row.
  double LogEmission(std::size_t state, double observation) const;

  /// Maximum-probability state sequence for the given per-frame observation
  /// rows. Ties resolve toward the lower state index.
  std::vector<std::size_t> Decode(std::span<const std::vector<double>> observations) const;

 private:
  std::size_t n_bins_;
  std::size_t max_jump_bins_;
  double fmin_hz_;
  int bins_per_semitone_;
  double log_switch_;
  double log_stay_unvoiced_;
  double log_enter_bin_;
  double log_unvoiced_weight_;
  // log_voiced_[bin][d + max_jump_bins_] for bin-distance d.
  std::vector<std::vector<double>> log_voiced_;
};

PitchTrack PyinViterbi(std::span<const CandidateSet> per_frame_candidates,
                       const PyinConfig& config);

PitchTrack PyinTrack(const AudioSignal& signal, const PyinConfig& config);

}  // namespace pitchbench
