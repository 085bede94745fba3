#include "subevent/autodiff/adam.h"

#include <cmath>
#include <stdexcept>

namespace subevent::ad {

void AdamUpdate(std::span<double> param, std::span<const double> grad, AdamMoments &state,
                const AdamConfig &config) {
  if (grad.size() != param.size()) throw std::invalid_argument("AdamUpdate: size mismatch");
  if (state.m.size() != param.size()) {
    state.m.assign(param.size(), 0.0);
    state.v.assign(param.size(), 0.0);
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grad[i];
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    param[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
  }
}

void Adam::Step(ParameterSet &params) {
  for (auto &[name, tensor] : params) {
    if (!tensor.requires_grad()) continue;
    AdamUpdate(tensor.values(), tensor.mutable_grad(), moments_[name], config_);
  }
}

}  // namespace subevent::ad
