#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "frame_util.h"
#include "pitchbench/yaapt.h"

namespace pitchbench {

namespace {

double InterpolatedMagnitude(std::span<const double> spectrum, double bin) {
  const auto i = static_cast<std::size_t>(std::floor(bin));
  if (i + 1 >= spectrum.size()) return spectrum.back();
  const double frac = bin - static_cast<double>(i);
  return spectrum[i] * (1.0 - frac) + spectrum[i + 1] * frac;
}

}  // namespace

double LowBandEnergy(std::span<const double> spectrum, const YaaptConfig& config,
                     double freq_resolution_hz) {
  double energy = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double f = static_cast<double>(k) * freq_resolution_hz;
    if (f >= config.fmin_hz && f <= config.fmax_hz) energy += spectrum[k] * spectrum[k];
  }
  return energy;
}

std::vector<double> ComputeNlfer(std::span<const std::vector<double>> spectrogram,
                                 const YaaptConfig& config, double freq_resolution_hz) {
  std::vector<double> energy(spectrogram.size());
  double mean = 0.0;
  for (std::size_t t = 0; t < spectrogram.size(); ++t) {
    energy[t] = LowBandEnergy(spectrogram[t], config, freq_resolution_hz);
    mean += energy[t];
  }
  if (spectrogram.empty()) return energy;
  mean /= static_cast<double>(spectrogram.size());
  if (!(mean > 0.0)) return std::vector<double>(spectrogram.size(), 0.0);
  for (double& e : energy) e /= mean;
  return energy;
}

double ComputeShc(std::span<const double> spectrum, double f_hz, const YaaptConfig& config,
                  double freq_resolution_hz) {
  if (spectrum.size() < 2) throw std::invalid_argument("SHC needs a spectrum of at least 2 bins");
  const double nyquist = static_cast<double>(spectrum.size() - 1) * freq_resolution_hz;
  const int harmonics = config.shc_num_harmonics + 1;
  const double half_window = config.shc_window_hz / 2.0;
  if (!(f_hz > 0.0) || harmonics * f_hz + half_window > nyquist) {
    throw std::invalid_argument("SHC frequency " + std::to_string(f_hz) +
                                " Hz out of range for this spectrum");
  }
  const auto offsets = static_cast<int>(std::floor(half_window / freq_resolution_hz));
  double total = 0.0;
  for (int k = -offsets; k <= offsets; ++k) {
    double product = 1.0;
    for (int r = 1; r <= harmonics; ++r) {
      const double bin = (r * f_hz) / freq_resolution_hz + k;
      product *= bin < 0.0 ? 0.0 : InterpolatedMagnitude(spectrum, bin);
    }
    total += product;
  }
  return total;
}

std::vector<double> ShcSearchGrid(const YaaptConfig& config) {
  const double octaves = std::log2(config.fmax_hz / config.fmin_hz);
  const auto steps = static_cast<std::size_t>(std::floor(octaves * kShcGridStepsPerOctave + 1e-9));
  std::vector<double> grid(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    grid[i] = config.fmin_hz *
              std::exp2(static_cast<double>(i) / static_cast<double>(kShcGridStepsPerOctave));
  }
  return grid;
}

namespace {

std::vector<std::vector<double>> Spectrogram(const AudioSignal& x, std::size_t n_frames,
                                             const YaaptConfig& config) {
  const double rate = x.sample_rate_hz();
  const std::size_t frame_len = std::min(MsToSamples(config.frame_len_ms, rate), kSpectralFftSize);
  const std::vector<double> window = HannWindow(frame_len);
  const double hop_seconds = config.hop_ms / 1000.0;
  std::vector<std::vector<double>> spectrogram(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k) {
    auto frame =
        detail::CenteredFrame(x.samples(), detail::FrameCenter(k, hop_seconds, rate), frame_len);
    for (std::size_t j = 0; j < frame_len; ++j) frame[j] *= window[j];
    spectrogram[k] = MagnitudeSpectrum(frame, kSpectralFftSize);
  }
  return spectrogram;
}

}  // namespace

SpectralTrack SpectralPitchTrack(const PreprocessedPair& pre, const YaaptConfig& config) {
  const double resolution = pre.nonlinear.sample_rate_hz() / static_cast<double>(kSpectralFftSize);
  const auto spectrogram = Spectrogram(pre.nonlinear, pre.n_frames, config);

  SpectralTrack track;
  track.hop_seconds = config.hop_ms / 1000.0;
  // Squaring moves a pure tone's energy to twice its frequency, possibly out
  // of the f0 band, so a frame counts as energetic if either branch is.
  const auto nlfer_a =
      ComputeNlfer(Spectrogram(pre.filtered, pre.n_frames, config), config, resolution);
  const auto nlfer_b = ComputeNlfer(spectrogram, config, resolution);
  track.nlfer.resize(pre.n_frames);
  for (std::size_t k = 0; k < pre.n_frames; ++k) {
    track.nlfer[k] = std::max(nlfer_a[k], nlfer_b[k]);
  }
  track.coarse_f0_hz.assign(pre.n_frames, 0.0);
  const std::vector<double> grid = ShcSearchGrid(config);
  for (std::size_t k = 0; k < pre.n_frames; ++k) {
    if (track.nlfer[k] < config.nlfer_threshold) continue;
    double best = -1.0;
    for (double f : grid) {
      const double shc = ComputeShc(spectrogram[k], f, config, resolution);
      if (shc > best) {
        best = shc;
        track.coarse_f0_hz[k] = f;
      }
    }
  }
  return track;
}

SpectralTrack SpectralPitchTrack(const AudioSignal& signal, const YaaptConfig& config) {
  return SpectralPitchTrack(YaaptPreprocess(signal, config), config);
}

}  // namespace pitchbench
