#include "subevent/evalkit/burst.h"

#include <numeric>

#include <fmt/format.h>

#include "subevent/errors.h"

namespace subevent::evalkit {

std::vector<int> BurstBaseline(std::span<const std::size_t> counts, const BurstConfig &config) {
  if (!(config.threshold > 0.0)) {
    throw ConfigError(fmt::format("burst threshold must be > 0, got {}", config.threshold));
  }
  std::vector<int> flags(counts.size(), 0);
  if (counts.empty()) return flags;
  const double global_mean =
      static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0})) /
      static_cast<double>(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto count = static_cast<double>(counts[i]);
    if (counts[i] == 0) continue;
    double reference = 1.0;
    if (config.window > 0) {
      if (i < config.window) {
        reference = global_mean;
      } else {
        double total = 0.0;
        for (std::size_t j = i - config.window; j < i; ++j) total += static_cast<double>(counts[j]);
        reference = total / static_cast<double>(config.window);
      }
    }
    flags[i] = count >= config.threshold * reference;
  }
  return flags;
}

}  // namespace subevent::evalkit
