#pragma once

#include <map>
#include <string>

#include "subevent/autodiff/tensor.h"

namespace subevent::ad {

// Named tensors in deterministic (lexicographic) order. std::map keeps
// element addresses stable, which Graph::Parameter relies on.
using ParameterSet = std::map<std::string, Tensor>;

inline void ZeroGrads(ParameterSet &params) {
  for (auto &[name, t] : params) t.ZeroGrad();
}

}  // namespace subevent::ad
