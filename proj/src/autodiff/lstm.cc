#include "subevent/autodiff/lstm.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "subevent/autodiff/ops.h"

namespace subevent::ad {
namespace {

double Sigm(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::size_t HiddenWidth(const LstmWeights &weights) {
  const Tensor &u = weights.recurrent.value();
  if (u.rank() != 2 || u.dim(1) != 4 * u.dim(0)) {
    throw std::invalid_argument(
        fmt::format("LSTM recurrent weights must be [h x 4h], got {}", ShapeToString(u.shape())));
  }
  return u.dim(0);
}

}  // namespace

LstmState LstmZeroState(Graph &graph, std::size_t d_h) {
  return {graph.Constant(Tensor::Zeros({d_h})), graph.Constant(Tensor::Zeros({d_h}))};
}

LstmState LstmStep(Var projected_input, const LstmState &prev, Var recurrent) {
  const Tensor &px = projected_input.value();
  const Tensor &hp = prev.h.value();
  const Tensor &cp = prev.c.value();
  const Tensor &u = recurrent.value();
  const std::size_t h = hp.size();
  if (px.rank() != 1 || px.size() != 4 * h || cp.size() != h || u.rank() != 2 ||
      u.dim(0) != h || u.dim(1) != 4 * h) {
    throw std::invalid_argument(fmt::format("LstmStep: shapes x{} h{} c{} U{} are inconsistent",
                                            ShapeToString(px.shape()), ShapeToString(hp.shape()),
                                            ShapeToString(cp.shape()), ShapeToString(u.shape())));
  }

  // gates holds i, f, g, o after their nonlinearities.
  std::vector<double> gates(px.values().begin(), px.values().end());
  for (std::size_t r = 0; r < h; ++r) {
    const double hr = hp[r];
    if (hr == 0.0) continue;
    const double *ur = u.values().data() + r * 4 * h;
    for (std::size_t j = 0; j < 4 * h; ++j) gates[j] += hr * ur[j];
  }
  for (std::size_t j = 0; j < h; ++j) {
    gates[j] = Sigm(gates[j]);
    gates[h + j] = Sigm(gates[h + j]);
    gates[2 * h + j] = std::tanh(gates[2 * h + j]);
    gates[3 * h + j] = Sigm(gates[3 * h + j]);
  }
  Tensor packed({2, h});
  std::vector<double> tanh_c(h);
  for (std::size_t j = 0; j < h; ++j) {
    const double c = gates[h + j] * cp[j] + gates[j] * gates[2 * h + j];
    tanh_c[j] = std::tanh(c);
    packed.at(0, j) = gates[3 * h + j] * tanh_c[j];
    packed.at(1, j) = c;
  }

  const Var inputs[] = {projected_input, prev.h, prev.c, recurrent};
  Var state = projected_input.graph().Record(
      std::move(packed), inputs,
      [px_var = projected_input, hp_var = prev.h, cp_var = prev.c, recurrent, h,
       gates = std::move(gates), tanh_c = std::move(tanh_c)](Graph &g, std::span<const double> d) {
        const double *dh = d.data();
        const double *dc_out = d.data() + h;
        const Tensor &cp = cp_var.value();
        std::vector<double> da(4 * h);
        auto dcp = g.grad(cp_var);
        for (std::size_t j = 0; j < h; ++j) {
          const double i = gates[j], f = gates[h + j], gg = gates[2 * h + j],
                       o = gates[3 * h + j];
          const double tc = tanh_c[j];
          const double dc = dc_out[j] + dh[j] * o * (1.0 - tc * tc);
          da[j] = dc * gg * i * (1.0 - i);
          da[h + j] = dc * cp[j] * f * (1.0 - f);
          da[2 * h + j] = dc * i * (1.0 - gg * gg);
          da[3 * h + j] = dh[j] * tc * o * (1.0 - o);
          if (!dcp.empty()) dcp[j] += dc * f;
        }
        if (auto dpx = g.grad(px_var); !dpx.empty()) {
          for (std::size_t j = 0; j < 4 * h; ++j) dpx[j] += da[j];
        }
        const Tensor &u = recurrent.value();
        const Tensor &hp = hp_var.value();
        if (auto dhp = g.grad(hp_var); !dhp.empty()) {
          for (std::size_t r = 0; r < h; ++r) {
            const double *ur = u.values().data() + r * 4 * h;
            double acc = 0.0;
            for (std::size_t j = 0; j < 4 * h; ++j) acc += ur[j] * da[j];
            dhp[r] += acc;
          }
        }
        if (auto du = g.grad(recurrent); !du.empty()) {
          for (std::size_t r = 0; r < h; ++r) {
            const double hr = hp[r];
            if (hr == 0.0) continue;
            double *dur = du.data() + r * 4 * h;
            for (std::size_t j = 0; j < 4 * h; ++j) dur[j] += hr * da[j];
          }
        }
      });
  return {Row(state, 0), Row(state, 1)};
}

LstmState LstmCell(Var x, const LstmState &prev, const LstmWeights &weights) {
  HiddenWidth(weights);
  return LstmStep(AddBias(MatMul(x, weights.input), weights.bias), prev, weights.recurrent);
}

Var LstmSequence(Var xs, const LstmWeights &weights) {
  const std::size_t h = HiddenWidth(weights);
  if (xs.value().rank() != 2 || xs.value().dim(0) == 0) {
    throw std::invalid_argument("LstmSequence: expected a non-empty [n x d_in] input");
  }
  const std::size_t n = xs.value().dim(0);
  Var projected = AddBias(MatMul(xs, weights.input), weights.bias);
  LstmState state = LstmZeroState(xs.graph(), h);
  std::vector<Var> hidden;
  hidden.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    state = LstmStep(Row(projected, t), state, weights.recurrent);
    hidden.push_back(state.h);
  }
  return Stack(hidden);
}

Var LstmFinalState(Var xs, const LstmWeights &weights) {
  const std::size_t h = HiddenWidth(weights);
  if (xs.value().rank() != 2 || xs.value().dim(0) == 0) {
    throw std::invalid_argument("LstmFinalState: expected a non-empty [n x d_in] input");
  }
  const std::size_t n = xs.value().dim(0);
  Var projected = AddBias(MatMul(xs, weights.input), weights.bias);
  LstmState state = LstmZeroState(xs.graph(), h);
  for (std::size_t t = 0; t < n; ++t) state = LstmStep(Row(projected, t), state, weights.recurrent);
  return state.h;
}

}  // namespace subevent::ad
