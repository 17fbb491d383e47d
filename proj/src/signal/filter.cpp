#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pitchbench/signal.h"
#include "pitchbench/simd/kernels.h"

namespace pitchbench {

namespace {

std::vector<double> WindowedSinc(double cutoff_hz, double sample_rate_hz, std::size_t order) {
  const std::size_t half = order / 2;
  const double fc = cutoff_hz / sample_rate_hz;
  std::vector<double> h(order + 1);
  // Built from |m| and mirrored so the taps are exactly symmetric.
  for (std::size_t k = 0; k <= half; ++k) {
    const double m = static_cast<double>(k);
    const double sinc = k == 0 ? 2.0 * fc
                               : std::sin(2.0 * std::numbers::pi * fc * m) / (std::numbers::pi * m);
    const double hamming =
        0.54 + 0.46 * std::cos(2.0 * std::numbers::pi * m / static_cast<double>(order));
    h[half + k] = h[half - k] = sinc * hamming;
  }
  double sum = 0.0;
  for (double v : h) sum += v;
  for (double& v : h) v /= sum;
  return h;
}

void CheckOrder(std::size_t order) {
  if (order == 0 || order % 2 != 0) {
    throw std::invalid_argument("FIR order must be even and positive for a centered filter");
  }
}

}  // namespace

std::vector<double> DesignLowpass(double cutoff_hz, double sample_rate_hz, std::size_t order) {
  CheckOrder(order);
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    throw std::invalid_argument("low-pass cutoff " + std::to_string(cutoff_hz) +
                                " Hz outside (0, Nyquist)");
  }
  return WindowedSinc(cutoff_hz, sample_rate_hz, order);
}

std::vector<double> DesignBandpass(double low_hz, double high_hz, double sample_rate_hz,
                                   std::size_t order) {
  CheckOrder(order);
  if (!(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < sample_rate_hz / 2.0)) {
    throw std::invalid_argument("band [" + std::to_string(low_hz) + ", " +
                                std::to_string(high_hz) + "] Hz outside (0, Nyquist)");
  }
  std::vector<double> h = WindowedSinc(high_hz, sample_rate_hz, order);
  const std::vector<double> low = WindowedSinc(low_hz, sample_rate_hz, order);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] -= low[i];
  return h;
}

std::vector<double> FirFilterCentered(std::span<const double> x, std::span<const double> taps) {
  if (taps.size() % 2 != 1) throw std::invalid_argument("centered FIR needs odd tap count");
  const std::size_t half = taps.size() / 2;
  const std::size_t n = x.size();
  // Zero padding on both sides turns the centered convolution into one
  // contiguous dot product per output sample. Taps are symmetric, so no
  // reversal is needed.
  std::vector<double> padded(n + 2 * half, 0.0);
  std::copy(x.begin(), x.end(), padded.begin() + static_cast<std::ptrdiff_t>(half));
  const auto& k = simd::ActiveKernels();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = k.dot(padded.data() + i, taps.data(), taps.size());
  }
  return y;
}

AudioSignal BandpassFilter(const AudioSignal& signal, double low_hz, double high_hz) {
  const auto taps = DesignBandpass(low_hz, high_hz, signal.sample_rate_hz());
  return AudioSignal(FirFilterCentered(signal.samples(), taps), signal.sample_rate_hz());
}

AudioSignal Decimate(const AudioSignal& signal, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("decimation factor must be positive");
  if (factor == 1) return signal;
  const double new_rate = signal.sample_rate_hz() / static_cast<double>(factor);
  const auto taps = DesignLowpass(0.45 * new_rate, signal.sample_rate_hz());
  const auto filtered = FirFilterCentered(signal.samples(), taps);
  std::vector<double> out;
  out.reserve(filtered.size() / factor + 1);
  for (std::size_t i = 0; i < filtered.size(); i += factor) out.push_back(filtered[i]);
  return AudioSignal(std::move(out), new_rate);
}

}  // namespace pitchbench
