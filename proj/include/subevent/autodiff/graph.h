#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "subevent/autodiff/tensor.h"

namespace subevent::ad {

class Graph;

// Handle to a node recorded in a Graph. Cheap to copy; valid while the graph
// is alive and has not been reset.
class Var {
 public:
  Var() = default;

  Graph &graph() const { return *graph_; }
  std::size_t id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

  const Tensor &value() const;
  const Shape &shape() const { return value().shape(); }

 private:
  friend class Graph;
  Var(Graph *graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph *graph_ = nullptr;
  std::size_t id_ = 0;
};

// Tape of executed primitives. Nodes are appended in execution order, so the
// record is topologically sorted by construction and Backward() is a single
// reverse sweep.
class Graph {
 public:
  // Receives the gradient of the node's output; accumulates into inputs via
  // Graph::grad().
  using BackwardFn = std::function<void(Graph &graph, std::span<const double> out_grad)>;

  Graph() = default;
  // A graph built with record_gradients = false never needs a gradient, so
  // no backward closures are kept (inference).
  explicit Graph(bool record_gradients) : record_gradients_(record_gradients) {}
  Graph(const Graph &) = delete;
  Graph &operator=(const Graph &) = delete;

  Var Constant(Tensor value);
  // The node aliases `param`; its gradient accumulates directly into
  // param.mutable_grad(). `param` must outlive the graph's use of it.
  Var Parameter(Tensor &param);
  // Records a primitive. `backward` runs only when some input needs a
  // gradient.
  Var Record(Tensor value, std::span<const Var> inputs, BackwardFn backward);

  const Tensor &value(Var v) const;
  bool needs_grad(Var v) const { return nodes_[v.id()].needs_grad; }
  // Gradient buffer of a node that needs one; empty span otherwise.
  std::span<double> grad(Var v);

  // Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse. A second call
  // without Reset() is an error.
  void Backward(Var loss);
  void Reset();

  std::size_t size() const { return nodes_.size(); }
  bool backpropagated() const { return backpropagated_; }

 private:
  struct Node {
    Tensor own;
    Tensor *param = nullptr;
    std::vector<double> grad;
    BackwardFn backward;
    bool needs_grad = false;
  };

  std::vector<Node> nodes_;
  bool backpropagated_ = false;
  bool record_gradients_ = true;
};

inline const Tensor &Var::value() const { return graph_->value(*this); }

}  // namespace subevent::ad
