#include "subevent/autodiff/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace subevent::ad {
namespace {

double Evaluate(const ScalarFn &fn) {
  Graph graph;
  Var out = fn(graph);
  if (out.value().size() != 1) throw std::invalid_argument("gradient check needs a scalar output");
  const double v = out.value()[0];
  if (!std::isfinite(v)) throw std::domain_error("gradient check: non-finite function value");
  return v;
}

}  // namespace

GradCheckReport GradientCheck(const ScalarFn &fn, ParameterSet &params,
                              const GradCheckOptions &options) {
  ZeroGrads(params);
  {
    Graph graph;
    Var out = fn(graph);
    if (!std::isfinite(out.value()[0])) {
      throw std::domain_error("gradient check: non-finite function value");
    }
    graph.Backward(out);
  }

  GradCheckReport report;
  for (auto &[name, tensor] : params) {
    if (!tensor.requires_grad()) continue;
    const std::vector<double> analytic(tensor.mutable_grad().begin(), tensor.mutable_grad().end());
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double saved = tensor[i];
      tensor[i] = saved + options.step;
      const double plus = Evaluate(fn);
      tensor[i] = saved - options.step;
      const double minus = Evaluate(fn);
      tensor[i] = saved;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double a = analytic[i];
      if (!std::isfinite(a)) {
        throw std::domain_error(fmt::format("gradient check: non-finite gradient in {}[{}]", name, i));
      }
      const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.checked;
      if (report.checked == 1 || rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = name;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

}  // namespace subevent::ad
