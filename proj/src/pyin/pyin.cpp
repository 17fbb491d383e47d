#include "pitchbench/pyin.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pitchbench {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Shape parameter of the threshold prior; the second parameter follows from
// the configured mean.
constexpr double kPriorAlpha = 2.0;

double SafeLog(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace

void PyinConfig::Validate(double sample_rate_hz) const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("pyin config: " + what); };
  if (!(fmin_hz > 0.0) || !(fmin_hz < fmax_hz)) fail("need 0 < fmin < fmax");
  if (sample_rate_hz > 0.0 && !(fmax_hz < sample_rate_hz / 2.0)) fail("fmax must be below Nyquist");
  if (!(frame_len_ms > 0.0) || !(hop_ms > 0.0)) fail("frame length and hop must be positive");
  if (n_thresholds < 1) fail("n_thresholds must be >= 1");
  if (!(threshold_prior_mean > 0.0 && threshold_prior_mean < 1.0)) {
    fail("threshold_prior_mean must be in (0, 1)");
  }
  if (bins_per_semitone < 1) fail("bins_per_semitone must be >= 1");
  if (!(switch_prob > 0.0 && switch_prob < 1.0)) fail("switch_prob must be in (0, 1)");
  if (!(max_transition_semitones >= 0.0)) fail("max_transition_semitones must be >= 0");
}

ThresholdPrior MakeThresholdPrior(const PyinConfig& config) {
  const auto n = static_cast<std::size_t>(config.n_thresholds);
  const double beta = kPriorAlpha * (1.0 - config.threshold_prior_mean) / config.threshold_prior_mean;
  ThresholdPrior prior{std::vector<double>(n), std::vector<double>(n)};
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    prior.thresholds[i] = static_cast<double>(i + 1) / static_cast<double>(n);
    const double mid = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    prior.weights[i] = std::pow(mid, kPriorAlpha - 1.0) * std::pow(1.0 - mid, beta - 1.0);
    total += prior.weights[i];
  }
  for (double& w : prior.weights) w /= total;
  return prior;
}

LagRange PyinLagRange(const PyinConfig& config, double sample_rate_hz) {
  const auto min_lag =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(sample_rate_hz / config.fmax_hz)));
  // One extra lag so the parabola around the longest period has a right
  // neighbour.
  const auto max_lag = static_cast<std::size_t>(std::ceil(sample_rate_hz / config.fmin_hz)) + 1;
  return {min_lag, max_lag};
}

CandidateSet PyinCandidates(std::span<const double> frame, const PyinConfig& config,
                            double sample_rate_hz) {
  config.Validate(sample_rate_hz);
  const LagRange range = PyinLagRange(config, sample_rate_hz);
  if (2 * range.max_lag >= frame.size()) {
    throw std::invalid_argument("pyin: frame of " + std::to_string(frame.size()) +
                                " samples too short for fmin " + std::to_string(config.fmin_hz) +
                                " Hz");
  }
  const LagCurve cmnd = Cmnd(YinDifference(frame, range.max_lag));

  std::vector<std::size_t> minima;
  for (std::size_t tau = range.min_lag; tau < range.max_lag; ++tau) {
    const double v = cmnd.values[tau];
    if (v < cmnd.values[tau - 1] && v <= cmnd.values[tau + 1]) minima.push_back(tau);
  }

  const ThresholdPrior prior = MakeThresholdPrior(config);
  std::vector<double> mass(minima.size(), 0.0);
  for (std::size_t i = 0; i < prior.thresholds.size(); ++i) {
    for (std::size_t m = 0; m < minima.size(); ++m) {
      if (cmnd.values[minima[m]] < prior.thresholds[i]) {
        mass[m] += prior.weights[i];
        break;
      }
    }
  }

  CandidateSet out;
  for (std::size_t m = 0; m < minima.size(); ++m) {
    if (mass[m] <= 0.0) continue;
    const double lag = ParabolicRefine(cmnd, minima[m]);
    const double f0 = std::clamp(sample_rate_hz / lag, config.fmin_hz, config.fmax_hz);
    out.push_back({f0, std::min(mass[m], 1.0)});
  }
  return out;
}

PyinHmm::PyinHmm(const PyinConfig& config)
    : fmin_hz_(config.fmin_hz), bins_per_semitone_(config.bins_per_semitone) {
  config.Validate();
  const double semitones = 12.0 * std::log2(config.fmax_hz / config.fmin_hz);
  n_bins_ = static_cast<std::size_t>(std::floor(semitones * config.bins_per_semitone + 1e-9)) + 1;
  max_jump_bins_ = static_cast<std::size_t>(
      std::floor(config.max_transition_semitones * config.bins_per_semitone + 1e-9));

  const double s = config.switch_prob;
  log_switch_ = std::log(s);
  log_stay_unvoiced_ = std::log1p(-s);
  log_enter_bin_ = std::log(s / static_cast<double>(n_bins_));
  log_unvoiced_weight_ = -std::log(static_cast<double>(max_jump_bins_ + 1));

  // Triangular weights over bin distance, renormalized per source bin over
  // the targets that exist on the grid.
  const auto width = static_cast<double>(max_jump_bins_ + 1);
  log_voiced_.assign(n_bins_, std::vector<double>(2 * max_jump_bins_ + 1, kNegInf));
  for (std::size_t from = 0; from < n_bins_; ++from) {
    double total = 0.0;
    for (std::size_t to = 0; to < n_bins_; ++to) {
      const auto d = static_cast<double>(from > to ? from - to : to - from);
      if (d <= static_cast<double>(max_jump_bins_)) total += width - d;
    }
    for (std::size_t slot = 0; slot < 2 * max_jump_bins_ + 1; ++slot) {
      const auto to = static_cast<std::ptrdiff_t>(from + slot) -
                      static_cast<std::ptrdiff_t>(max_jump_bins_);
      if (to < 0 || to >= static_cast<std::ptrdiff_t>(n_bins_)) continue;
      const double d = std::abs(static_cast<double>(slot) - static_cast<double>(max_jump_bins_));
      log_voiced_[from][slot] = std::log((1.0 - s) * (width - d) / total);
    }
  }
}

double PyinHmm::BinFrequency(std::size_t bin) const {
  return fmin_hz_ * std::exp2(static_cast<double>(bin) / (12.0 * bins_per_semitone_));
}

std::size_t PyinHmm::BinOf(double f0_hz) const {
  const double pos = 12.0 * bins_per_semitone_ * std::log2(f0_hz / fmin_hz_);
  const double clamped = std::clamp(std::round(pos), 0.0, static_cast<double>(n_bins_ - 1));
  return static_cast<std::size_t>(clamped);
}

double PyinHmm::LogTransition(std::size_t from, std::size_t to) const {
  if (from == kUnvoiced) return to == kUnvoiced ? log_stay_unvoiced_ : log_enter_bin_;
  if (to == kUnvoiced) return log_switch_;
  const std::size_t a = from - 1;
  const std::size_t b = to - 1;
  const std::size_t dist = a > b ? a - b : b - a;
  if (dist > max_jump_bins_) return kNegInf;
  return log_voiced_[a][b + max_jump_bins_ - a];
}

double PyinHmm::LogInitial(std::size_t state) const {
  return state == kUnvoiced ? std::log(0.5) : std::log(0.5 / static_cast<double>(n_bins_));
}

std::vector<double> PyinHmm::Observation(const CandidateSet& candidates) const {
  std::vector<double> obs(n_states(), 0.0);
  double voiced = 0.0;
  for (const auto& c : candidates) {
    obs[BinOf(c.f0_hz) + 1] += c.probability;
    voiced += c.probability;
  }
  obs[kUnvoiced] = std::max(0.0, 1.0 - voiced);
  return obs;
}

double PyinHmm::LogEmission(std::size_t state, double observation) const {
  const double l = SafeLog(observation);
  return state == kUnvoiced && l != kNegInf ? l + log_unvoiced_weight_ : l;
}

std::vector<std::size_t> PyinHmm::Decode(std::span<const std::vector<double>> observations) const {
  const std::size_t frames = observations.size();
  const std::size_t states = n_states();
  std::vector<std::size_t> path(frames, kUnvoiced);
  if (frames == 0) return path;

  std::vector<double> delta(states);
  std::vector<double> next(states);
  std::vector<std::vector<std::size_t>> back(frames, std::vector<std::size_t>(states, kUnvoiced));

  auto seed = [&](std::size_t t) {
    for (std::size_t s = 0; s < states; ++s) delta[s] = LogInitial(s) + LogEmission(s, observations[t][s]);
  };
  seed(0);

  for (std::size_t t = 1; t < frames; ++t) {
    const auto& obs = observations[t];
    // Unvoiced target.
    {
      double best = delta[kUnvoiced] + log_stay_unvoiced_;
      std::size_t arg = kUnvoiced;
      for (std::size_t s = 1; s < states; ++s) {
        const double v = delta[s] + log_switch_;
        if (v > best) {
          best = v;
          arg = s;
        }
      }
      next[kUnvoiced] = best + LogEmission(kUnvoiced, obs[kUnvoiced]);
      back[t][kUnvoiced] = arg;
    }
    for (std::size_t to_bin = 0; to_bin < n_bins_; ++to_bin) {
      const std::size_t to = to_bin + 1;
      const double log_obs = LogEmission(to, obs[to]);
      if (log_obs == kNegInf) {
        next[to] = kNegInf;
        back[t][to] = kUnvoiced;
        continue;
      }
      double best = delta[kUnvoiced] + log_enter_bin_;
      std::size_t arg = kUnvoiced;
      const std::size_t lo = to_bin >= max_jump_bins_ ? to_bin - max_jump_bins_ : 0;
      const std::size_t hi = std::min(n_bins_ - 1, to_bin + max_jump_bins_);
      for (std::size_t from_bin = lo; from_bin <= hi; ++from_bin) {
        const double v =
            delta[from_bin + 1] + log_voiced_[from_bin][to_bin + max_jump_bins_ - from_bin];
        if (v > best) {
          best = v;
          arg = from_bin + 1;
        }
      }
      next[to] = best + log_obs;
      back[t][to] = arg;
    }
    delta.swap(next);
    // Every path died (e.g. consecutive certain pitches further apart than
    // the transition band): restart from the prior at this frame.
    if (std::all_of(delta.begin(), delta.end(), [](double v) { return v == kNegInf; })) {
      seed(t);
    }
  }

  std::size_t state = 0;
  for (std::size_t s = 1; s < states; ++s) {
    if (delta[s] > delta[state]) state = s;
  }
  for (std::size_t t = frames; t-- > 0;) {
    path[t] = state;
    state = back[t][state];
  }
  return path;
}

PitchTrack PyinViterbi(std::span<const CandidateSet> per_frame_candidates,
                       const PyinConfig& config) {
  const PyinHmm hmm(config);
  PitchTrack track;
  track.hop_seconds = config.hop_ms / 1000.0;
  if (per_frame_candidates.empty()) return track;

  std::vector<std::vector<double>> observations;
  observations.reserve(per_frame_candidates.size());
  for (const auto& set : per_frame_candidates) {
    for (const auto& c : set) {
      if (!(c.f0_hz > 0.0) || !(c.probability >= 0.0 && c.probability <= 1.0 + 1e-9)) {
        throw std::invalid_argument("pyin: invalid candidate");
      }
    }
    observations.push_back(hmm.Observation(set));
  }
  const auto path = hmm.Decode(observations);

  track.f0_hz.assign(path.size(), 0.0);
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (path[t] == PyinHmm::kUnvoiced) continue;
    // Report the most probable candidate that maps onto the chosen bin.
    double best_p = -1.0;
    for (const auto& c : per_frame_candidates[t]) {
      if (hmm.BinOf(c.f0_hz) + 1 == path[t] && c.probability > best_p) {
        best_p = c.probability;
        track.f0_hz[t] = c.f0_hz;
      }
    }
    if (best_p < 0.0) track.f0_hz[t] = hmm.BinFrequency(path[t] - 1);
  }
  return track;
}

PitchTrack PyinTrack(const AudioSignal& signal, const PyinConfig& config) {
  config.Validate(signal.sample_rate_hz());
  const double rate = signal.sample_rate_hz();
  const Frames frames =
      FrameSignal(signal, MsToSamples(config.frame_len_ms, rate), MsToSamples(config.hop_ms, rate));
  std::vector<CandidateSet> candidates(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    candidates[k] = PyinCandidates(frames[k], config, rate);
  }
  return PyinViterbi(candidates, config);
}

}  // namespace pitchbench
