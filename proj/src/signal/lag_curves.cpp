#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pitchbench/signal.h"
#include "pitchbench/simd/kernels.h"

namespace pitchbench {

LagCurve YinDifference(std::span<const double> frame, std::size_t max_lag) {
  if (2 * max_lag >= frame.size()) {
    throw std::invalid_argument("max_lag " + std::to_string(max_lag) +
                                " must be below half the frame length " +
                                std::to_string(frame.size()));
  }
  const auto& k = simd::ActiveKernels();
  const std::size_t window = frame.size() - max_lag;
  LagCurve curve{std::vector<double>(max_lag + 1, 0.0), 0, max_lag};
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    curve.values[tau] = k.sum_sq_diff(frame.data(), frame.data() + tau, window);
  }
  return curve;
}

LagCurve Cmnd(const LagCurve& diff) {
  if (diff.min_lag != 0 || diff.values.empty()) {
    throw std::invalid_argument("CMND needs a difference curve starting at lag 0");
  }
  LagCurve out{std::vector<double>(diff.values.size(), 1.0), 0, diff.max_lag};
  double running = 0.0;
  for (std::size_t tau = 1; tau < diff.values.size(); ++tau) {
    running += diff.values[tau];
    if (running > 0.0) {
      out.values[tau] = diff.values[tau] * static_cast<double>(tau) / running;
    }
  }
  return out;
}

LagCurve Nccf(std::span<const double> frame, std::size_t min_lag, std::size_t max_lag) {
  if (min_lag < 1 || min_lag > max_lag || 2 * max_lag >= frame.size()) {
    throw std::invalid_argument("NCCF lag range [" + std::to_string(min_lag) + ", " +
                                std::to_string(max_lag) + "] invalid for frame of " +
                                std::to_string(frame.size()));
  }
  const auto& k = simd::ActiveKernels();
  const std::size_t window = frame.size() - max_lag;
  const double e0 = k.sum_sq(frame.data(), window);
  LagCurve curve{std::vector<double>(max_lag - min_lag + 1, 0.0), min_lag, max_lag};
  if (e0 <= 0.0) return curve;
  for (std::size_t tau = min_lag; tau <= max_lag; ++tau) {
    const double* shifted = frame.data() + tau;
    const double et = k.sum_sq(shifted, window);
    if (et <= 0.0) continue;
    const double r = k.dot(frame.data(), shifted, window) / std::sqrt(e0 * et);
    curve.values[tau - min_lag] = std::clamp(r, -1.0, 1.0);
  }
  return curve;
}

double ParabolicRefine(const LagCurve& curve, std::size_t lag) {
  const double center = static_cast<double>(lag);
  if (lag <= curve.min_lag || lag >= curve.max_lag) return center;
  const double left = curve.at(lag - 1);
  const double mid = curve.at(lag);
  const double right = curve.at(lag + 1);
  const double curvature = left - 2.0 * mid + right;
  if (curvature == 0.0) return center;
  const double offset = std::clamp((left - right) / (2.0 * curvature), -1.0, 1.0);
  return center + offset;
}

}  // namespace pitchbench
