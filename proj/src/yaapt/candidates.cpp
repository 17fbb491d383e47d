#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "frame_util.h"
#include "pitchbench/yaapt.h"

namespace pitchbench {

namespace {

// Candidates from the two branches closer than this (relative frequency)
// describe the same period; the higher merit one is kept.
constexpr double kMergeTolerance = 0.02;
// Relative tolerance when testing whether one period is an integer multiple
// of another.
constexpr double kMultipleTolerance = 0.02;
// A candidate that is a period multiple of a stronger-or-equal one is
// redundant unless its merit exceeds that one's by more than this.
constexpr double kMeritMargin = 0.02;

bool IsIntegerMultiple(double longer, double shorter) {
  const double ratio = longer / shorter;
  const double k = std::round(ratio);
  return k >= 2.0 && std::abs(ratio - k) <= kMultipleTolerance * k;
}

struct Peak {
  double lag;
  double merit;
};

// Local NCCF maxima, with peaks whose period is a multiple of a shorter,
// equally strong period removed (a periodic signal correlates at every
// multiple of its period), then the strongest n.
std::vector<Peak> BranchPeaks(const LagCurve& nccf, std::size_t n) {
  std::vector<Peak> peaks;
  for (std::size_t lag = nccf.min_lag + 1; lag < nccf.max_lag; ++lag) {
    const double v = nccf.at(lag);
    if (v > 0.0 && v > nccf.at(lag - 1) && v >= nccf.at(lag + 1)) {
      peaks.push_back({ParabolicRefine(nccf, lag), std::min(v, 1.0)});
    }
  }
  std::vector<Peak> kept;
  for (const Peak& p : peaks) {
    const bool multiple = std::any_of(kept.begin(), kept.end(), [&](const Peak& q) {
      return IsIntegerMultiple(p.lag, q.lag) && p.merit <= q.merit + kMeritMargin;
    });
    if (!multiple) kept.push_back(p);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Peak& a, const Peak& b) { return a.merit > b.merit; });
  if (kept.size() > n) kept.resize(n);
  return kept;
}

}  // namespace

std::vector<YaaptCandidateSet> NccfCandidates(const PreprocessedPair& pre,
                                              const YaaptConfig& config) {
  const double rate = pre.filtered.sample_rate_hz();
  const std::size_t frame_len = MsToSamples(config.frame_len_ms, rate);
  const auto min_lag =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(rate / config.fmax_hz)));
  const auto max_lag = static_cast<std::size_t>(std::ceil(rate / config.fmin_hz)) + 1;
  if (2 * max_lag >= frame_len) {
    throw std::invalid_argument("yaapt: " + std::to_string(config.frame_len_ms) +
                                " ms frame too short for fmin " + std::to_string(config.fmin_hz) +
                                " Hz");
  }
  const double hop_seconds = config.hop_ms / 1000.0;
  const auto per_branch = static_cast<std::size_t>(config.n_candidates_per_frame);

  std::vector<YaaptCandidateSet> out(pre.n_frames);
  for (std::size_t k = 0; k < pre.n_frames; ++k) {
    const std::size_t center = detail::FrameCenter(k, hop_seconds, rate);
    const auto frame_a = detail::CenteredFrame(pre.filtered.samples(), center, frame_len);
    const auto frame_b = detail::CenteredFrame(pre.nonlinear.samples(), center, frame_len);
    const LagCurve nccf_a = Nccf(frame_a, min_lag, max_lag);
    const auto original = BranchPeaks(nccf_a, per_branch);
    const auto nonlinear = BranchPeaks(Nccf(frame_b, min_lag, max_lag), per_branch);

    YaaptCandidateSet raw;
    for (const Peak& p : original) raw.push_back({rate / p.lag, p.merit});
    for (const Peak& p : nonlinear) {
      // The nonlinearity creates components at sums and multiples of the
      // input's frequencies (a sine squares to twice its frequency). A lag at
      // which the original waveform is anti-correlated cannot be its period.
      const auto lag = static_cast<std::size_t>(std::lround(p.lag));
      if (nccf_a.contains(lag) && nccf_a.at(lag) < 0.0) continue;
      raw.push_back({rate / p.lag, p.merit});
    }
    for (auto& c : raw) c.f0_hz = std::clamp(c.f0_hz, config.fmin_hz, config.fmax_hz);

    std::stable_sort(raw.begin(), raw.end(),
                     [](const auto& a, const auto& b) { return a.merit > b.merit; });
    YaaptCandidateSet merged;
    for (const auto& c : raw) {
      const bool duplicate = std::any_of(merged.begin(), merged.end(), [&](const auto& m) {
        return std::abs(m.f0_hz - c.f0_hz) <= kMergeTolerance * m.f0_hz;
      });
      if (!duplicate) merged.push_back(c);
    }
    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return a.f0_hz < b.f0_hz; });
    out[k] = std::move(merged);
  }
  return out;
}

}  // namespace pitchbench
