#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace subevent::evalkit {

struct BurstConfig {
  double threshold = 3.0;  // theta
  std::size_t window = 5;  // w; 0 means an absolute count threshold
};

// Flags bins whose tweet count is a burst.
//   window == 0: count >= threshold.
//   window  > 0: count >= threshold * mean(previous `window` counts), where
//                the first `window` bins use the stream-wide mean instead.
// A bin with zero tweets is never flagged.
std::vector<int> BurstBaseline(std::span<const std::size_t> counts, const BurstConfig &config);

}  // namespace subevent::evalkit
