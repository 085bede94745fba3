#include "subevent/autodiff/ops.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace subevent::ad {
namespace {

[[noreturn]] void ShapeError(const char *op, const Shape &a, const Shape &b) {
  throw std::invalid_argument(
      fmt::format("{}: incompatible shapes {} and {}", op, ShapeToString(a), ShapeToString(b)));
}

void RequireRank(const char *op, const Tensor &t, std::size_t rank) {
  if (t.rank() != rank) {
    throw std::invalid_argument(
        fmt::format("{}: expected rank {}, got shape {}", op, rank, ShapeToString(t.shape())));
  }
}

// c[n x m] += a[n x k] * b[k x m]
void Gemm(std::size_t n, std::size_t k, std::size_t m, const double *a, const double *b,
          double *c) {
  for (std::size_t i = 0; i < n; ++i) {
    double *ci = c + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const double *bp = b + p * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += aip * bp[j];
    }
  }
}

// c[n x k] += g[n x m] * b[k x m]^T
void GemmRhsT(std::size_t n, std::size_t k, std::size_t m, const double *g, const double *b,
              double *c) {
  for (std::size_t i = 0; i < n; ++i) {
    const double *gi = g + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double *bp = b + p * m;
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += gi[j] * bp[j];
      c[i * k + p] += acc;
    }
  }
}

// c[k x m] += a[n x k]^T * g[n x m]
void GemmLhsT(std::size_t n, std::size_t k, std::size_t m, const double *a, const double *g,
              double *c) {
  for (std::size_t i = 0; i < n; ++i) {
    const double *gi = g + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      double *cp = c + p * m;
      for (std::size_t j = 0; j < m; ++j) cp[j] += aip * gi[j];
    }
  }
}

double Sigm(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var MatMul(Var a, Var b) {
  const Tensor &ta = a.value();
  const Tensor &tb = b.value();
  if (ta.rank() < 1 || ta.rank() > 2 || tb.rank() < 1 || tb.rank() > 2) {
    ShapeError("MatMul", ta.shape(), tb.shape());
  }
  const std::size_t n = ta.rank() == 2 ? ta.dim(0) : 1;
  const std::size_t k = ta.shape().back();
  const std::size_t kb = tb.dim(0);
  const std::size_t m = tb.rank() == 2 ? tb.dim(1) : 1;
  if (k != kb) ShapeError("MatMul", ta.shape(), tb.shape());

  Shape out_shape;
  if (ta.rank() == 2) out_shape.push_back(n);
  if (tb.rank() == 2) out_shape.push_back(m);
  if (out_shape.empty()) out_shape.push_back(1);
  Tensor out(out_shape);
  Gemm(n, k, m, ta.values().data(), tb.values().data(), out.values().data());

  const Var inputs[] = {a, b};
  return a.graph().Record(std::move(out), inputs,
                          [a, b, n, k, m](Graph &g, std::span<const double> dc) {
                            if (auto da = g.grad(a); !da.empty()) {
                              GemmRhsT(n, k, m, dc.data(), b.value().values().data(), da.data());
                            }
                            if (auto db = g.grad(b); !db.empty()) {
                              GemmLhsT(n, k, m, a.value().values().data(), dc.data(), db.data());
                            }
                          });
}

namespace {

template <typename Forward, typename DA, typename DB>
Var Elementwise(const char *name, Var a, Var b, Forward forward, DA da_fn, DB db_fn) {
  const Tensor &ta = a.value();
  const Tensor &tb = b.value();
  if (ta.shape() != tb.shape()) ShapeError(name, ta.shape(), tb.shape());
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = forward(ta[i], tb[i]);
  const Var inputs[] = {a, b};
  return a.graph().Record(std::move(out), inputs,
                          [a, b, da_fn, db_fn](Graph &g, std::span<const double> dc) {
                            const Tensor &va = a.value();
                            const Tensor &vb = b.value();
                            if (auto da = g.grad(a); !da.empty()) {
                              for (std::size_t i = 0; i < dc.size(); ++i) {
                                da[i] += dc[i] * da_fn(va[i], vb[i]);
                              }
                            }
                            if (auto db = g.grad(b); !db.empty()) {
                              for (std::size_t i = 0; i < dc.size(); ++i) {
                                db[i] += dc[i] * db_fn(va[i], vb[i]);
                              }
                            }
                          });
}

}  // namespace

Var Add(Var a, Var b) {
  return Elementwise(
      "Add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Var Sub(Var a, Var b) {
  return Elementwise(
      "Sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Var Mul(Var a, Var b) {
  return Elementwise(
      "Mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Var Scale(Var x, double factor) {
  Tensor out = x.value();
  out.set_requires_grad(false);
  for (double &v : out.values()) v *= factor;
  const Var inputs[] = {x};
  return x.graph().Record(std::move(out), inputs,
                          [x, factor](Graph &g, std::span<const double> dc) {
                            auto dx = g.grad(x);
                            for (std::size_t i = 0; i < dc.size(); ++i) dx[i] += factor * dc[i];
                          });
}

Var AddBias(Var x, Var bias) {
  const Tensor &tx = x.value();
  const Tensor &tb = bias.value();
  if (tb.rank() != 1 || tx.rank() < 1 || tx.rank() > 2 || tx.shape().back() != tb.dim(0)) {
    ShapeError("AddBias", tx.shape(), tb.shape());
  }
  const std::size_t m = tb.dim(0);
  const std::size_t n = m == 0 ? 0 : tx.size() / m;
  Tensor out(tx.shape());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] = tx[i * m + j] + tb[j];
  }
  const Var inputs[] = {x, bias};
  return x.graph().Record(std::move(out), inputs,
                          [x, bias, n, m](Graph &g, std::span<const double> dc) {
                            if (auto dx = g.grad(x); !dx.empty()) {
                              for (std::size_t i = 0; i < dc.size(); ++i) dx[i] += dc[i];
                            }
                            if (auto db = g.grad(bias); !db.empty()) {
                              for (std::size_t i = 0; i < n; ++i) {
                                for (std::size_t j = 0; j < m; ++j) db[j] += dc[i * m + j];
                              }
                            }
                          });
}

Var Sum(Var x) {
  double total = 0.0;
  for (double v : x.value().values()) total += v;
  const Var inputs[] = {x};
  return x.graph().Record(Tensor::Scalar(total), inputs,
                          [x](Graph &g, std::span<const double> dc) {
                            auto dx = g.grad(x);
                            for (double &v : dx) v += dc[0];
                          });
}

Var Reshape(Var x, Shape shape) {
  const Tensor &tx = x.value();
  if (NumElements(shape) != tx.size()) ShapeError("Reshape", tx.shape(), shape);
  Tensor out(std::move(shape), std::vector<double>(tx.values().begin(), tx.values().end()));
  const Var inputs[] = {x};
  return x.graph().Record(std::move(out), inputs, [x](Graph &g, std::span<const double> dc) {
    auto dx = g.grad(x);
    for (std::size_t i = 0; i < dc.size(); ++i) dx[i] += dc[i];
  });
}

Var Stack(std::span<const Var> rows) {
  if (rows.empty()) throw std::invalid_argument("Stack: no rows");
  const std::size_t d = rows[0].value().size();
  Tensor out({rows.size(), d});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Tensor &r = rows[i].value();
    if (r.rank() != 1 || r.size() != d) ShapeError("Stack", rows[0].shape(), r.shape());
    std::copy(r.values().begin(), r.values().end(), out.values().begin() + i * d);
  }
  std::vector<Var> saved(rows.begin(), rows.end());
  return rows[0].graph().Record(std::move(out), rows,
                                [saved, d](Graph &g, std::span<const double> dc) {
                                  for (std::size_t i = 0; i < saved.size(); ++i) {
                                    auto dr = g.grad(saved[i]);
                                    if (dr.empty()) continue;
                                    for (std::size_t j = 0; j < d; ++j) dr[j] += dc[i * d + j];
                                  }
                                });
}

Var Row(Var x, std::size_t index) {
  const Tensor &tx = x.value();
  RequireRank("Row", tx, 2);
  if (index >= tx.dim(0)) throw std::invalid_argument("Row: index out of range");
  const std::size_t d = tx.dim(1);
  Tensor out({d});
  std::copy_n(tx.values().begin() + index * d, d, out.values().begin());
  const Var inputs[] = {x};
  return x.graph().Record(std::move(out), inputs,
                          [x, index, d](Graph &g, std::span<const double> dc) {
                            auto dx = g.grad(x);
                            for (std::size_t j = 0; j < d; ++j) dx[index * d + j] += dc[j];
                          });
}

Var Embedding(Var table, std::span<const int> ids) {
  const Tensor &tt = table.value();
  RequireRank("Embedding", tt, 2);
  const std::size_t vocab = tt.dim(0);
  const std::size_t d = tt.dim(1);
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      throw std::invalid_argument(fmt::format("Embedding: id {} outside table of {} rows", id, vocab));
    }
  }
  Tensor out({ids.size(), d});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::copy_n(tt.values().begin() + ids[i] * d, d, out.values().begin() + i * d);
  }
  std::vector<int> saved(ids.begin(), ids.end());
  const Var inputs[] = {table};
  return table.graph().Record(std::move(out), inputs,
                              [table, saved = std::move(saved), d](Graph &g,
                                                                   std::span<const double> dc) {
                                auto dt = g.grad(table);
                                for (std::size_t i = 0; i < saved.size(); ++i) {
                                  double *row = dt.data() + saved[i] * d;
                                  for (std::size_t j = 0; j < d; ++j) row[j] += dc[i * d + j];
                                }
                              });
}

Var Pool(PoolKind kind, Var x) {
  const Tensor &tx = x.value();
  RequireRank("Pool", tx, 2);
  const std::size_t n = tx.dim(0);
  const std::size_t d = tx.dim(1);
  if (n == 0) throw std::invalid_argument("Pool: empty input");
  Tensor out({d});
  const Var inputs[] = {x};
  if (kind == PoolKind::kMean) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) out[j] += tx.at(i, j);
    }
    for (double &v : out.values()) v /= static_cast<double>(n);
    return x.graph().Record(std::move(out), inputs,
                            [x, n, d](Graph &g, std::span<const double> dc) {
                              auto dx = g.grad(x);
                              const double inv = 1.0 / static_cast<double>(n);
                              for (std::size_t i = 0; i < n; ++i) {
                                for (std::size_t j = 0; j < d; ++j) dx[i * d + j] += dc[j] * inv;
                              }
                            });
  }
  std::vector<std::size_t> argmax(d, 0);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 1; i < n; ++i) {
      if (tx.at(i, j) > tx.at(argmax[j], j)) argmax[j] = i;
    }
    out[j] = tx.at(argmax[j], j);
  }
  return x.graph().Record(std::move(out), inputs,
                          [x, d, argmax = std::move(argmax)](Graph &g, std::span<const double> dc) {
                            auto dx = g.grad(x);
                            for (std::size_t j = 0; j < d; ++j) dx[argmax[j] * d + j] += dc[j];
                          });
}

Var WeightedSum(Var x, Var weights) {
  const Tensor &tx = x.value();
  const Tensor &tw = weights.value();
  RequireRank("WeightedSum", tx, 2);
  if (tw.rank() != 1 || tw.dim(0) != tx.dim(0)) ShapeError("WeightedSum", tx.shape(), tw.shape());
  const std::size_t n = tx.dim(0);
  const std::size_t d = tx.dim(1);
  Tensor out({d});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[j] += tw[i] * tx.at(i, j);
  }
  const Var inputs[] = {x, weights};
  return x.graph().Record(std::move(out), inputs,
                          [x, weights, n, d](Graph &g, std::span<const double> dc) {
                            const Tensor &vx = x.value();
                            const Tensor &vw = weights.value();
                            if (auto dx = g.grad(x); !dx.empty()) {
                              for (std::size_t i = 0; i < n; ++i) {
                                for (std::size_t j = 0; j < d; ++j) dx[i * d + j] += vw[i] * dc[j];
                              }
                            }
                            if (auto dw = g.grad(weights); !dw.empty()) {
                              for (std::size_t i = 0; i < n; ++i) {
                                double acc = 0.0;
                                for (std::size_t j = 0; j < d; ++j) acc += vx.at(i, j) * dc[j];
                                dw[i] += acc;
                              }
                            }
                          });
}

Var Softmax(Var x) {
  const Tensor &tx = x.value();
  RequireRank("Softmax", tx, 1);
  if (tx.size() == 0) throw std::invalid_argument("Softmax: empty input");
  const double mx = *std::max_element(tx.values().begin(), tx.values().end());
  Tensor out(tx.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    out[i] = std::exp(tx[i] - mx);
    total += out[i];
  }
  for (double &v : out.values()) v /= total;
  std::vector<double> probs(out.values().begin(), out.values().end());
  const Var inputs[] = {x};
  return x.graph().Record(std::move(out), inputs,
                          [x, p = std::move(probs)](Graph &g, std::span<const double> dc) {
                            double dot = 0.0;
                            for (std::size_t i = 0; i < dc.size(); ++i) dot += dc[i] * p[i];
                            auto dx = g.grad(x);
                            for (std::size_t i = 0; i < dc.size(); ++i) {
                              dx[i] += p[i] * (dc[i] - dot);
                            }
                          });
}

Var Conv1d(Var x, Var kernels, Var bias) {
  const Tensor &tx = x.value();
  const Tensor &tk = kernels.value();
  const Tensor &tb = bias.value();
  RequireRank("Conv1d", tx, 2);
  RequireRank("Conv1d kernels", tk, 3);
  RequireRank("Conv1d bias", tb, 1);
  const std::size_t n = tx.dim(0);
  const std::size_t d_in = tx.dim(1);
  const std::size_t w = tk.dim(0);
  const std::size_t d_out = tk.dim(2);
  if (w == 0) throw std::invalid_argument("Conv1d: window must be >= 1");
  if (tk.dim(1) != d_in) ShapeError("Conv1d", tx.shape(), tk.shape());
  if (tb.dim(0) != d_out) ShapeError("Conv1d", tk.shape(), tb.shape());
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(w / 2);

  Tensor out({n, d_out});
  for (std::size_t t = 0; t < n; ++t) {
    double *o = out.values().data() + t * d_out;
    for (std::size_t c = 0; c < d_out; ++c) o[c] = tb[c];
    for (std::size_t j = 0; j < w; ++j) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + j) - half;
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(n)) continue;
      Gemm(1, d_in, d_out, tx.values().data() + src * d_in,
           tk.values().data() + j * d_in * d_out, o);
    }
  }
  const Var inputs[] = {x, kernels, bias};
  return x.graph().Record(
      std::move(out), inputs,
      [x, kernels, bias, n, d_in, d_out, w, half](Graph &g, std::span<const double> dc) {
        auto dx = g.grad(x);
        auto dk = g.grad(kernels);
        auto db = g.grad(bias);
        const double *xv = x.value().values().data();
        const double *kv = kernels.value().values().data();
        for (std::size_t t = 0; t < n; ++t) {
          const double *go = dc.data() + t * d_out;
          if (!db.empty()) {
            for (std::size_t c = 0; c < d_out; ++c) db[c] += go[c];
          }
          for (std::size_t j = 0; j < w; ++j) {
            const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + j) - half;
            if (src < 0 || src >= static_cast<std::ptrdiff_t>(n)) continue;
            if (!dx.empty()) {
              GemmRhsT(1, d_in, d_out, go, kv + j * d_in * d_out, dx.data() + src * d_in);
            }
            if (!dk.empty()) {
              GemmLhsT(1, d_in, d_out, xv + src * d_in, go, dk.data() + j * d_in * d_out);
            }
          }
        }
      });
}

Var Activation(ActivationKind kind, Var x) {
  const Tensor &tx = x.value();
  Tensor out(tx.shape());
  for (std::size_t i = 0; i < tx.size(); ++i) {
    switch (kind) {
      case ActivationKind::kTanh: out[i] = std::tanh(tx[i]); break;
      case ActivationKind::kSigmoid: out[i] = Sigm(tx[i]); break;
      case ActivationKind::kRelu: out[i] = tx[i] > 0.0 ? tx[i] : 0.0; break;
    }
  }
  // Derivatives are expressed through the saved input so the closure does not
  // need the output node.
  const Var inputs[] = {x};
  return x.graph().Record(std::move(out), inputs,
                          [x, kind](Graph &g, std::span<const double> dc) {
                            const Tensor &vx = x.value();
                            auto dx = g.grad(x);
                            for (std::size_t i = 0; i < dc.size(); ++i) {
                              double d = 0.0;
                              switch (kind) {
                                case ActivationKind::kTanh: {
                                  const double t = std::tanh(vx[i]);
                                  d = 1.0 - t * t;
                                  break;
                                }
                                case ActivationKind::kSigmoid: {
                                  const double s = Sigm(vx[i]);
                                  d = s * (1.0 - s);
                                  break;
                                }
                                case ActivationKind::kRelu: d = vx[i] > 0.0 ? 1.0 : 0.0; break;
                              }
                              dx[i] += dc[i] * d;
                            }
                          });
}

Var Dropout(Var x, double p, Mode mode, Rng &rng) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument(fmt::format("Dropout: probability {} outside [0, 1)", p));
  }
  if (mode == Mode::kEval || p == 0.0) return x;
  const Tensor &tx = x.value();
  std::vector<double> mask(tx.size());
  const double keep_scale = 1.0 / (1.0 - p);
  for (double &m : mask) m = rng.Uniform() < p ? 0.0 : keep_scale;
  Tensor out(tx.shape());
  for (std::size_t i = 0; i < tx.size(); ++i) out[i] = tx[i] * mask[i];
  const Var inputs[] = {x};
  return x.graph().Record(std::move(out), inputs,
                          [x, mask = std::move(mask)](Graph &g, std::span<const double> dc) {
                            auto dx = g.grad(x);
                            for (std::size_t i = 0; i < dc.size(); ++i) dx[i] += dc[i] * mask[i];
                          });
}

Var SoftmaxCrossEntropy(Var logits, std::span<const int> gold,
                        std::span<const double> class_weights) {
  const Tensor &tl = logits.value();
  RequireRank("SoftmaxCrossEntropy", tl, 2);
  const std::size_t n = tl.dim(0);
  const std::size_t classes = tl.dim(1);
  if (gold.size() != n) {
    throw std::invalid_argument(
        fmt::format("SoftmaxCrossEntropy: {} gold labels for {} rows", gold.size(), n));
  }
  if (n == 0) throw std::invalid_argument("SoftmaxCrossEntropy: empty batch");
  if (!class_weights.empty() && class_weights.size() != classes) {
    throw std::invalid_argument("SoftmaxCrossEntropy: class weight count mismatch");
  }
  std::vector<double> probs(n * classes);
  std::vector<double> row_weight(n, 1.0);
  double loss = 0.0;
  double total_weight = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = gold[i];
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw std::invalid_argument(
          fmt::format("SoftmaxCrossEntropy: gold id {} outside {} classes", y, classes));
    }
    const double *row = tl.values().data() + i * classes;
    const double mx = *std::max_element(row, row + classes);
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      probs[i * classes + c] = std::exp(row[c] - mx);
      z += probs[i * classes + c];
    }
    for (std::size_t c = 0; c < classes; ++c) probs[i * classes + c] /= z;
    if (!class_weights.empty()) row_weight[i] = class_weights[y];
    loss += row_weight[i] * (std::log(z) + mx - row[y]);
    total_weight += row_weight[i];
  }
  if (total_weight <= 0.0) throw std::invalid_argument("SoftmaxCrossEntropy: zero total weight");
  loss /= total_weight;
  std::vector<int> saved(gold.begin(), gold.end());
  const Var inputs[] = {logits};
  return logits.graph().Record(
      Tensor::Scalar(loss), inputs,
      [logits, saved = std::move(saved), probs = std::move(probs),
       row_weight = std::move(row_weight), total_weight, classes](Graph &g,
                                                                  std::span<const double> dc) {
        auto dl = g.grad(logits);
        for (std::size_t i = 0; i < saved.size(); ++i) {
          const double scale = dc[0] * row_weight[i] / total_weight;
          for (std::size_t c = 0; c < classes; ++c) {
            const double onehot = static_cast<int>(c) == saved[i] ? 1.0 : 0.0;
            dl[i * classes + c] += scale * (probs[i * classes + c] - onehot);
          }
        }
      });
}

}  // namespace subevent::ad
