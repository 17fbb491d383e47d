#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pitchbench/signal.h"

namespace pitchbench::detail {

// Center sample of frame k for a hop given in seconds. Rounding per frame
// keeps non-integer hops (e.g. 10 ms at 22.05 kHz) from drifting.
inline std::size_t FrameCenter(std::size_t k, double hop_seconds, double rate) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(k) * hop_seconds * rate));
}

// Frame of `len` samples centered on `center`, zero padded past the ends.
inline std::vector<double> CenteredFrame(std::span<const double> x, std::size_t center,
                                         std::size_t len) {
  std::vector<double> out(len, 0.0);
  const auto start = static_cast<std::ptrdiff_t>(center) - static_cast<std::ptrdiff_t>(len / 2);
  for (std::size_t j = 0; j < len; ++j) {
    const auto src = start + static_cast<std::ptrdiff_t>(j);
    if (src >= 0 && src < static_cast<std::ptrdiff_t>(x.size())) {
      out[j] = x[static_cast<std::size_t>(src)];
    }
  }
  return out;
}

}  // namespace pitchbench::detail
