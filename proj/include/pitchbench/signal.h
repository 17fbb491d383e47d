#pragma once

// Frame-level signal primitives shared by the pitch engines.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pitchbench {

/// Mono waveform with nominal range [-1, 1]. The constructor rejects a
/// non-positive rate or any non-finite sample.
class AudioSignal {
 public:
  AudioSignal(std::vector<double> samples, double sample_rate_hz);

  std::span<const double> samples() const { return samples_; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double duration_seconds() const { return static_cast<double>(size()) / sample_rate_hz_; }

 private:
  std::vector<double> samples_;
  double sample_rate_hz_;
};

/// Layout of centered analysis frames: frame k is centered on sample k * hop
/// and zero padded where it extends past either end of the signal.
struct FrameGrid {
  std::size_t frame_len_samples = 0;
  std::size_t hop_samples = 0;
  std::size_t n_frames = 0;
  bool centered = true;

  /// floor(signal_length / hop) + 1, or 0 for an empty signal.
  static std::size_t FrameCount(std::size_t signal_length, std::size_t hop);
  double TimeOf(std::size_t frame, double sample_rate_hz) const;
};

/// All frames of a signal in one contiguous buffer.
class Frames {
 public:
  Frames(FrameGrid grid, std::vector<double> data);

  const FrameGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.n_frames; }
  std::span<const double> operator[](std::size_t k) const;

 private:
  FrameGrid grid_;
  std::vector<double> data_;
};

/// A function of integer lag over [min_lag, max_lag].
struct LagCurve {
  std::vector<double> values;
  std::size_t min_lag = 0;
  std::size_t max_lag = 0;

  double at(std::size_t lag) const { return values[lag - min_lag]; }
  bool contains(std::size_t lag) const { return lag >= min_lag && lag <= max_lag; }
};

/// Hop length in samples for `hop_ms` at `sample_rate_hz`, rounded to nearest.
std::size_t MsToSamples(double ms, double sample_rate_hz);

Frames FrameSignal(const AudioSignal& signal, std::size_t frame_len_samples,
                   std::size_t hop_samples);

/// YIN squared difference d(tau) = sum_{j<W} (x[j] - x[j+tau])^2 for
/// tau in [0, max_lag], with W = frame.size() - max_lag so every lag sums the
/// same number of terms. Requires 2 * max_lag < frame.size().
LagCurve YinDifference(std::span<const double> frame, std::size_t max_lag);

/// Cumulative mean normalized difference. d'(0) = 1; lags where the running
/// sum of d is zero also map to 1.
LagCurve Cmnd(const LagCurve& diff);

/// Normalized cross-correlation over [min_lag, max_lag] with the same fixed
/// window convention as YinDifference. Lags with a zero energy term yield 0.
LagCurve Nccf(std::span<const double> frame, std::size_t min_lag, std::size_t max_lag);

/// Fractional lag of the extremum of the parabola through (lag-1, lag, lag+1),
/// clamped to [lag-1, lag+1]. Returns `lag` unchanged at the curve boundary or
/// when the three points are collinear.
double ParabolicRefine(const LagCurve& curve, std::size_t lag);

/// Order used by the linear-phase FIR designs below (taps = order + 1).
inline constexpr std::size_t kFirOrder = 150;

/// Hamming-windowed sinc low-pass taps, normalized to unit DC gain.
std::vector<double> DesignLowpass(double cutoff_hz, double sample_rate_hz,
                                  std::size_t order = kFirOrder);

/// Band-pass taps built as the difference of two windowed-sinc low-pass
/// designs.
std::vector<double> DesignBandpass(double low_hz, double high_hz, double sample_rate_hz,
                                   std::size_t order = kFirOrder);

/// Convolves with odd-length symmetric taps and removes the group delay, so
/// output sample i is aligned with input sample i.
std::vector<double> FirFilterCentered(std::span<const double> x, std::span<const double> taps);

/// Zero-phase band-pass of the whole signal. Requires
/// 0 < low_hz < high_hz < sample_rate / 2.
AudioSignal BandpassFilter(const AudioSignal& signal, double low_hz, double high_hz);

/// Anti-aliased integer-factor decimation; output sample k is input sample
/// k * factor after low-pass filtering. factor == 1 returns a copy.
AudioSignal Decimate(const AudioSignal& signal, std::size_t factor);

/// Periodic-free (symmetric) Hann window of length n.
std::vector<double> HannWindow(std::size_t n);

/// In-place iterative radix-2 FFT. Size must be a power of two.
void Fft(std::vector<std::complex<double>>& data);

/// |X[k]| for k in [0, fft_size/2] of the zero-padded frame.
std::vector<double> MagnitudeSpectrum(std::span<const double> frame, std::size_t fft_size);

}  // namespace pitchbench
