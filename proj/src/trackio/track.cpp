#include "pitchbench/track.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pitchbench {

std::size_t PitchTrack::VoicedCount() const {
  return static_cast<std::size_t>(
      std::count_if(f0_hz.begin(), f0_hz.end(), [](double f) { return f > 0.0; }));
}

void PitchTrack::Validate() const {
  if (!(hop_seconds > 0.0) || !std::isfinite(hop_seconds)) {
    throw std::invalid_argument("track hop must be positive");
  }
  for (std::size_t i = 0; i < f0_hz.size(); ++i) {
    if (!std::isfinite(f0_hz[i]) || f0_hz[i] < 0.0) {
      throw std::invalid_argument("invalid f0 at frame " + std::to_string(i));
    }
  }
  if (confidence) {
    if (confidence->size() != f0_hz.size()) {
      throw std::invalid_argument("confidence length does not match frame count");
    }
    for (std::size_t i = 0; i < confidence->size(); ++i) {
      const double c = (*confidence)[i];
      if (!(c >= 0.0 && c <= 1.0)) {
        throw std::invalid_argument("confidence outside [0, 1] at frame " + std::to_string(i));
      }
    }
  }
}

void TrackSource::Validate() const {
  if (label.empty()) throw std::invalid_argument("track source label must not be empty");
}

}  // namespace pitchbench
