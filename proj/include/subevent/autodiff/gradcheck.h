#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "subevent/autodiff/graph.h"
#include "subevent/autodiff/parameters.h"

namespace subevent::ad {

struct GradCheckOptions {
  double tolerance = 1e-4;
  double step = 1e-5;
  // Relative errors are measured against max(|analytic|, |numeric|, floor);
  // gradients smaller than the floor are compared absolutely.
  double floor = 1e-6;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  bool passed = true;
};

// Builds a scalar on a fresh graph from the current parameter values.
// Must be a pure function of the parameters (reseed any dropout Rng inside).
using ScalarFn = std::function<Var(Graph &graph)>;

// Compares backpropagated gradients with central differences for every
// element of every tensor in `params` that requires a gradient. Throws
// std::domain_error on non-finite values. Parameter values are restored and
// gradients are left holding the analytic result.
GradCheckReport GradientCheck(const ScalarFn &fn, ParameterSet &params,
                              const GradCheckOptions &options = {});

}  // namespace subevent::ad
