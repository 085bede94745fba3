#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "subevent/autodiff/graph.h"
#include "subevent/autodiff/rng.h"

// Differentiable primitives. Vectors are rank-1 tensors; sequences of
// vectors are rank-2 tensors with one row per element. Shape violations throw
// std::invalid_argument.
namespace subevent::ad {

enum class PoolKind { kMean, kMax };
enum class ActivationKind { kTanh, kSigmoid, kRelu };
enum class Mode { kTrain, kEval };

// a[n x k] * b[k x m]. A rank-1 `a` acts as a row vector and a rank-1 `b` as
// a column vector; the corresponding output axis is dropped.
Var MatMul(Var a, Var b);

Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var x, double factor);
// x[n x m] + bias[m] on every row; also accepts rank-1 x of length m.
Var AddBias(Var x, Var bias);
// Sum of all elements, as a [1] tensor.
Var Sum(Var x);
Var Reshape(Var x, Shape shape);

// Stacks equal-length vectors into a [count x d] matrix.
Var Stack(std::span<const Var> rows);
Var Row(Var x, std::size_t index);

// Row gather table[ids[i]]; backward scatter-adds into the table.
Var Embedding(Var table, std::span<const int> ids);

// Column-wise pooling over the rows of x[n x d] (n >= 1). Max routes the
// gradient to the first arg-max row.
Var Pool(PoolKind kind, Var x);

// Sum_i weights[i] * x[i, :] for x[n x d], weights[n].
Var WeightedSum(Var x, Var weights);
// Softmax over a rank-1 tensor.
Var Softmax(Var x);

// Same-length 1-d convolution with floor(w/2) zero padding on each side.
// x[n x d_in], kernels[w x d_in x d_out], bias[d_out]. The tap at offset j
// reads row t + j - floor(w/2).
Var Conv1d(Var x, Var kernels, Var bias);

Var Activation(ActivationKind kind, Var x);
inline Var Tanh(Var x) { return Activation(ActivationKind::kTanh, x); }
inline Var Sigmoid(Var x) { return Activation(ActivationKind::kSigmoid, x); }
inline Var Relu(Var x) { return Activation(ActivationKind::kRelu, x); }

// Inverted dropout: in train mode each element is zeroed with probability p
// and survivors are scaled by 1/(1-p). Identity in eval mode.
Var Dropout(Var x, double p, Mode mode, Rng &rng);

// Mean over rows of -log softmax(logits[i])[gold[i]]. With class weights the
// mean is weighted: sum_i w[g_i] * nll_i / sum_i w[g_i].
Var SoftmaxCrossEntropy(Var logits, std::span<const int> gold,
                        std::span<const double> class_weights = {});

}  // namespace subevent::ad
