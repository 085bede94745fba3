#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "subevent/autodiff/parameters.h"

namespace subevent::ad {

struct AdamConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
};

// Bias-corrected Adam update of one tensor in place.
void AdamUpdate(std::span<double> param, std::span<const double> grad, AdamMoments &state,
                const AdamConfig &config);

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // Updates every tensor that requires a gradient, using its accumulated
  // gradient. Tensors without an allocated gradient are treated as having a
  // zero gradient.
  void Step(ParameterSet &params);

  const AdamConfig &config() const { return config_; }

 private:
  AdamConfig config_;
  std::map<std::string, AdamMoments> moments_;
};

}  // namespace subevent::ad
