#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pitchbench {

inline constexpr double kDefaultHopSeconds = 0.010;

/// Per-frame fundamental frequency. 0.0 Hz marks an unvoiced frame.
struct PitchTrack {
  double hop_seconds = kDefaultHopSeconds;
  std::vector<double> f0_hz;
  std::optional<std::vector<double>> confidence;

  std::size_t size() const { return f0_hz.size(); }
  bool voiced(std::size_t frame) const { return f0_hz[frame] > 0.0; }
  std::size_t VoicedCount() const;

  /// Throws std::invalid_argument when an invariant is broken: hop must be
  /// positive, every f0 finite and >= 0, confidence (if any) the same length
  /// as f0 and inside [0, 1].
  void Validate() const;
};

enum class TrackKind { kReference, kComputed, kExternal };

struct TrackSource {
  TrackKind kind = TrackKind::kComputed;
  std::string label;
  std::string origin_path;

  void Validate() const;
};

}  // namespace pitchbench
