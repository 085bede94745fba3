#pragma once

#include <cstddef>

#include "subevent/autodiff/graph.h"

namespace subevent::ad {

// Gate blocks are laid out [input | forget | candidate | output], each d_h
// wide.
struct LstmWeights {
  Var input;      // [d_in x 4*d_h]
  Var recurrent;  // [d_h x 4*d_h]
  Var bias;       // [4*d_h]
};

struct LstmState {
  Var h;
  Var c;
};

LstmState LstmZeroState(Graph &graph, std::size_t d_h);

// One step of a standard LSTM:
//   i, f, o = sigmoid(.), g = tanh(.), c = f*c_prev + i*g, h = o*tanh(c).
LstmState LstmCell(Var x, const LstmState &prev, const LstmWeights &weights);

// Same cell with the input projection x*W + b already applied, so a sequence
// can project all inputs with one matrix product.
LstmState LstmStep(Var projected_input, const LstmState &prev, Var recurrent);

// Runs the cell left to right over the rows of xs[n x d_in] from a zero state
// and returns every hidden state as an [n x d_h] matrix.
Var LstmSequence(Var xs, const LstmWeights &weights);

// Final hidden state after consuming all rows of xs (n >= 1).
Var LstmFinalState(Var xs, const LstmWeights &weights);

}  // namespace subevent::ad
