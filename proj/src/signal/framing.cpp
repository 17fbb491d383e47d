#include <cmath>
#include <stdexcept>
#include <string>

#include "pitchbench/signal.h"

namespace pitchbench {

AudioSignal::AudioSignal(std::vector<double> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw std::invalid_argument("sample rate must be positive, got " +
                                std::to_string(sample_rate_hz_));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw std::invalid_argument("non-finite sample at index " + std::to_string(i));
    }
  }
}

std::size_t FrameGrid::FrameCount(std::size_t signal_length, std::size_t hop) {
  if (signal_length == 0) return 0;
  return signal_length / hop + 1;
}

double FrameGrid::TimeOf(std::size_t frame, double sample_rate_hz) const {
  return static_cast<double>(frame * hop_samples) / sample_rate_hz;
}

Frames::Frames(FrameGrid grid, std::vector<double> data)
    : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.n_frames * grid_.frame_len_samples) {
    throw std::invalid_argument("frame buffer size does not match grid");
  }
}

std::span<const double> Frames::operator[](std::size_t k) const {
  return std::span<const double>(data_).subspan(k * grid_.frame_len_samples,
                                                grid_.frame_len_samples);
}

std::size_t MsToSamples(double ms, double sample_rate_hz) {
  const double n = std::round(ms * sample_rate_hz / 1000.0);
  if (!(n >= 1.0)) {
    throw std::invalid_argument("duration of " + std::to_string(ms) +
                                " ms is shorter than one sample");
  }
  return static_cast<std::size_t>(n);
}

Frames FrameSignal(const AudioSignal& signal, std::size_t frame_len_samples,
                   std::size_t hop_samples) {
  if (frame_len_samples == 0 || hop_samples == 0) {
    throw std::invalid_argument("frame length and hop must be positive");
  }
  FrameGrid grid{frame_len_samples, hop_samples,
                 FrameGrid::FrameCount(signal.size(), hop_samples), true};
  std::vector<double> data(grid.n_frames * frame_len_samples, 0.0);
  const auto x = signal.samples();
  const auto length = static_cast<std::ptrdiff_t>(x.size());
  const auto half = static_cast<std::ptrdiff_t>(frame_len_samples / 2);
  for (std::size_t k = 0; k < grid.n_frames; ++k) {
    const auto start = static_cast<std::ptrdiff_t>(k * hop_samples) - half;
    double* out = data.data() + k * frame_len_samples;
    for (std::size_t j = 0; j < frame_len_samples; ++j) {
      const auto src = start + static_cast<std::ptrdiff_t>(j);
      if (src >= 0 && src < length) out[j] = x[static_cast<std::size_t>(src)];
    }
  }
  return Frames(grid, std::move(data));
}

}  // namespace pitchbench
