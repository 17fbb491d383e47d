#include <cmath>
#include <stdexcept>
#include <string>

#include "pitchbench/yaapt.h"

namespace pitchbench {

void YaaptConfig::Validate(double sample_rate_hz) const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("yaapt config: " + what); };
  if (!(fmin_hz > 0.0) || !(fmin_hz < fmax_hz)) fail("need 0 < fmin < fmax");
  if (!(bp_low_hz > 0.0) || !(bp_low_hz < bp_high_hz)) fail("need 0 < bp_low < bp_high");
  if (!(frame_len_ms > 0.0) || !(hop_ms > 0.0)) fail("frame length and hop must be positive");
  if (shc_num_harmonics < 1) fail("shc_num_harmonics must be >= 1");
  if (!(shc_window_hz > 0.0)) fail("shc_window_hz must be positive");
  if (!(nlfer_threshold > 0.0)) fail("nlfer_threshold must be positive");
  if (n_candidates_per_frame < 1) fail("n_candidates_per_frame must be >= 1");
  if (!(dp_freq_jump_weight >= 0.0) || !(dp_voicing_switch_cost >= 0.0)) {
    fail("DP weights must be >= 0");
  }
  if (sample_rate_hz > 0.0) {
    const double nyquist =
        sample_rate_hz / static_cast<double>(YaaptDecimationFactor(sample_rate_hz)) / 2.0;
    if (!(bp_high_hz < nyquist) || !(fmax_hz < nyquist)) {
      fail("band and search range must lie below the analysis Nyquist frequency");
    }
  }
}

std::size_t YaaptDecimationFactor(double sample_rate_hz) {
  const auto factor = static_cast<std::size_t>(std::floor(sample_rate_hz / kYaaptAnalysisRateHz));
  return factor < 1 ? 1 : factor;
}

PreprocessedPair YaaptPreprocess(const AudioSignal& signal, const YaaptConfig& config) {
  config.Validate(signal.sample_rate_hz());
  const AudioSignal base = Decimate(signal, YaaptDecimationFactor(signal.sample_rate_hz()));

  std::vector<double> transformed(base.samples().begin(), base.samples().end());
  for (double& v : transformed) {
    v = config.nonlinearity == Nonlinearity::kSquare ? v * v : std::abs(v);
  }
  const double rate = base.sample_rate_hz();
  AudioSignal nonlinear = BandpassFilter(AudioSignal(std::move(transformed), rate),
                                         config.bp_low_hz, config.bp_high_hz);
  AudioSignal filtered = BandpassFilter(base, config.bp_low_hz, config.bp_high_hz);

  const std::size_t original_hop = MsToSamples(config.hop_ms, signal.sample_rate_hz());
  return PreprocessedPair{std::move(filtered), std::move(nonlinear),
                          MsToSamples(config.hop_ms, rate),
                          FrameGrid::FrameCount(signal.size(), original_hop)};
}

}  // namespace pitchbench
