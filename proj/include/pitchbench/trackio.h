#pragma once

// File formats: RIFF/WAVE input, reference pitch text files, external
// tracker CSVs and the canonical track CSV.

#include <cstdint>
#include <filesystem>
#include <span>

#include "pitchbench/errors.h"
#include "pitchbench/signal.h"
#include "pitchbench/track.h"

namespace pitchbench {

/// Reads PCM 16/24/32-bit integer or 32-bit float little-endian WAVE.
/// Integer samples are divided by the full-scale magnitude (2^(bits-1)).
/// Multi-channel files yield channel 0.
AudioSignal ReadWav(const std::filesystem::path& path);

enum class WavEncoding { kPcm16, kPcm24, kPcm32, kFloat32 };

/// Writes a mono WAVE file; integer encodings clip to full scale.
void WriteWav(const AudioSignal& signal, const std::filesystem::path& path,
              WavEncoding encoding = WavEncoding::kPcm16);

/// One frame per line, first whitespace-separated field is f0 in Hz
/// (0 = unvoiced); other fields are ignored, blank lines skipped.
PitchTrack ReadReferenceTrack(const std::filesystem::path& path,
                              double hop_seconds = kDefaultHopSeconds);

inline constexpr double kDefaultConfidenceThreshold = 0.5;
/// Maximum allowed deviation of any frame time from a uniform grid.
inline constexpr double kHopUniformityTolerance = 1e-6;

/// CSV with a header naming at least time_s and f0_hz, and optionally
/// confidence. Frames whose confidence is below the threshold become
/// unvoiced. The hop is inferred from the timestamps.
PitchTrack ReadExternalTrack(const std::filesystem::path& path,
                             double confidence_threshold = kDefaultConfidenceThreshold);

/// Canonical CSV: "frame,time_s,f0_hz[,confidence]", time with 6 decimals,
/// f0 and confidence with 6 significant digits, LF line endings.
void WriteTrack(const PitchTrack& track, const std::filesystem::path& path);

/// Voiced-frame statistics of a reference track.
struct TrackSummary {
  std::size_t voiced_frames = 0;
  double min_hz = 0.0;
  double median_hz = 0.0;
  double max_hz = 0.0;
};
TrackSummary Summarize(const PitchTrack& track);

}  // namespace pitchbench
