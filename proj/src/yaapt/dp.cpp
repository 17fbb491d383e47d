#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pitchbench/yaapt.h"

namespace pitchbench {

double YaaptCostModel::UnvoicedCost(double nlfer) const {
  return std::max(0.0, nlfer - config.nlfer_threshold);
}

double YaaptCostModel::VoicedCost(const YaaptCandidate& c, double coarse_f0_hz,
                                  double nlfer) const {
  double cost = 1.0 - c.merit + std::max(0.0, config.nlfer_threshold - nlfer);
  if (coarse_f0_hz > 0.0) {
    cost += config.dp_freq_jump_weight * std::abs(std::log2(c.f0_hz / coarse_f0_hz));
  }
  return cost;
}

double YaaptCostModel::TransitionCost(double from_f0_hz, double to_f0_hz) const {
  const bool from_voiced = from_f0_hz > 0.0;
  const bool to_voiced = to_f0_hz > 0.0;
  if (from_voiced != to_voiced) return config.dp_voicing_switch_cost;
  if (!from_voiced) return 0.0;
  return config.dp_freq_jump_weight * std::abs(std::log2(to_f0_hz / from_f0_hz));
}

PitchTrack YaaptDpSelect(std::span<const YaaptCandidateSet> candidates,
                         const SpectralTrack& spectral, const YaaptConfig& config) {
  const std::size_t frames = candidates.size();
  if (spectral.coarse_f0_hz.size() != frames || spectral.nlfer.size() != frames) {
    throw std::invalid_argument("yaapt: candidate and spectral frame counts differ");
  }
  const YaaptCostModel model{config};
  PitchTrack track;
  track.hop_seconds = config.hop_ms / 1000.0;
  track.f0_hz.assign(frames, 0.0);
  if (frames == 0) return track;

  // State 0 is unvoiced (f0 = 0); voiced states follow in increasing f0 so
  // strict comparisons break ties toward the lower frequency.
  std::vector<std::vector<double>> f0(frames);
  std::vector<std::vector<double>> cost(frames);
  std::vector<std::vector<std::size_t>> back(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    YaaptCandidateSet sorted(candidates[t].begin(), candidates[t].end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.f0_hz < b.f0_hz; });
    f0[t].push_back(0.0);
    cost[t].push_back(model.UnvoicedCost(spectral.nlfer[t]));
    for (const auto& c : sorted) {
      if (!(c.f0_hz > 0.0)) throw std::invalid_argument("yaapt: candidate f0 must be positive");
      f0[t].push_back(c.f0_hz);
      cost[t].push_back(model.VoicedCost(c, spectral.coarse_f0_hz[t], spectral.nlfer[t]));
    }
    back[t].assign(f0[t].size(), 0);
  }

  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < f0[t].size(); ++s) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t p = 0; p < f0[t - 1].size(); ++p) {
        const double v = cost[t - 1][p] + model.TransitionCost(f0[t - 1][p], f0[t][s]);
        if (v < best) {
          best = v;
          arg = p;
        }
      }
      cost[t][s] += best;
      back[t][s] = arg;
    }
  }

  const auto& last = cost[frames - 1];
  std::size_t state = static_cast<std::size_t>(
      std::distance(last.begin(), std::min_element(last.begin(), last.end())));
  for (std::size_t t = frames; t-- > 0;) {
    track.f0_hz[t] = f0[t][state];
    state = back[t][state];
  }
  return track;
}

PitchTrack YaaptTrack(const AudioSignal& signal, const YaaptConfig& config) {
  const PreprocessedPair pre = YaaptPreprocess(signal, config);
  const SpectralTrack spectral = SpectralPitchTrack(pre, config);
  const auto candidates = NccfCandidates(pre, config);
  return YaaptDpSelect(candidates, spectral, config);
}

}  // namespace pitchbench
