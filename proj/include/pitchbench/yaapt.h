#pragma once

// YAAPT-style tracker: band-pass and nonlinear preprocessing, a coarse
// spectral track from spectral harmonics correlation (SHC) gated by the
// normalized low-frequency energy ratio (NLFER), NCCF candidates from both
// preprocessed signals, and a dynamic-programming final selection.

#include <cstddef>
#include <span>
#include <vector>

#include "pitchbench/signal.h"
#include "pitchbench/track.h"

namespace pitchbench {

enum class Nonlinearity { kSquare, kAbsolute };

struct YaaptConfig {
  double fmin_hz = 60.0;
  double fmax_hz = 400.0;
  double bp_low_hz = 50.0;
  double bp_high_hz = 1500.0;
  double frame_len_ms = 35.0;
  double hop_ms = 10.0;
  int shc_num_harmonics = 3;
  double shc_window_hz = 40.0;
  double nlfer_threshold = 0.75;
  int n_candidates_per_frame = 5;
  double dp_freq_jump_weight = 0.35;
  double dp_voicing_switch_cost = 0.2;
  Nonlinearity nonlinearity = Nonlinearity::kSquare;

  void Validate(double sample_rate_hz = 0.0) const;
};

/// Rate the analysis runs at; inputs above it are decimated by an integer
/// factor first.
inline constexpr double kYaaptAnalysisRateHz = 16000.0;
inline constexpr std::size_t kSpectralFftSize = 1024;
/// Resolution of the log-frequency SHC search grid.
inline constexpr int kShcGridStepsPerOctave = 48;

struct PreprocessedPair {
  AudioSignal filtered;   // band-passed original
  AudioSignal nonlinear;  // band-passed nonlinear transform
  std::size_t hop_samples = 0;
  std::size_t n_frames = 0;  // frame count of the original signal's 10 ms grid
};

/// Integer decimation factor that brings `sample_rate_hz` closest to the
/// analysis rate without going below it (1 for rates under 32 kHz).
std::size_t YaaptDecimationFactor(double sample_rate_hz);

PreprocessedPair YaaptPreprocess(const AudioSignal& signal, const YaaptConfig& config);

struct SpectralTrack {
  double hop_seconds = kDefaultHopSeconds;
  std::vector<double> coarse_f0_hz;  // 0 where NLFER gates the frame
  std::vector<double> nlfer;
};

/// Sum of squared magnitudes over [fmin, fmax].
double LowBandEnergy(std::span<const double> spectrum, const YaaptConfig& config,
                     double freq_resolution_hz);

/// Per-frame low-band energy divided by its utterance mean; all zeros when
/// the utterance has no low-band energy. The spectral track takes the larger
/// value of the two preprocessed branches.
std::vector<double> ComputeNlfer(std::span<const std::vector<double>> spectrogram,
                                 const YaaptConfig& config, double freq_resolution_hz);

/// SHC(f) = sum over offsets f' in [-W/2, W/2] of prod_{r=1..NH+1} |S(r f + f')|,
/// with magnitudes linearly interpolated between bins.
double ComputeShc(std::span<const double> spectrum, double f_hz, const YaaptConfig& config,
                  double freq_resolution_hz);

/// Log-spaced frequencies searched by the spectral stage.
std::vector<double> ShcSearchGrid(const YaaptConfig& config);

SpectralTrack SpectralPitchTrack(const PreprocessedPair& pre, const YaaptConfig& config);
SpectralTrack SpectralPitchTrack(const AudioSignal& signal, const YaaptConfig& config);

struct YaaptCandidate {
  double f0_hz = 0.0;
  double merit = 0.0;
};
using YaaptCandidateSet = std::vector<YaaptCandidate>;

std::vector<YaaptCandidateSet> NccfCandidates(const PreprocessedPair& pre,
                                              const YaaptConfig& config);

/// Local costs and transition costs of the final selection, shared by the
/// DP and by anything that needs to score a given path.
struct YaaptCostModel {
  const YaaptConfig& config;

  double UnvoicedCost(double nlfer) const;
  /// Voicing a frame whose NLFER is below the threshold costs the shortfall.
  double VoicedCost(const YaaptCandidate& c, double coarse_f0_hz, double nlfer) const;
  /// f0 of 0 means unvoiced on either side.
  double TransitionCost(double from_f0_hz, double to_f0_hz) const;
};

PitchTrack YaaptDpSelect(std::span<const YaaptCandidateSet> candidates,
                         const SpectralTrack& spectral, const YaaptConfig& config);

PitchTrack YaaptTrack(const AudioSignal& signal, const YaaptConfig& config);

}  // namespace pitchbench
