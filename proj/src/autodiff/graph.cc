#include "subevent/autodiff/graph.h"

#include <stdexcept>

namespace subevent::ad {

Var Graph::Constant(Tensor value) {
  if (backpropagated_) throw std::logic_error("graph already backpropagated; call Reset()");
  Node node;
  node.own = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Graph::Parameter(Tensor &param) {
  if (backpropagated_) throw std::logic_error("graph already backpropagated; call Reset()");
  Node node;
  node.param = &param;
  node.needs_grad = record_gradients_ && param.requires_grad();
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Graph::Record(Tensor value, std::span<const Var> inputs, BackwardFn backward) {
  if (backpropagated_) throw std::logic_error("graph already backpropagated; call Reset()");
  Node node;
  node.own = std::move(value);
  for (const Var &in : inputs) {
    if (&in.graph() != this) throw std::invalid_argument("input belongs to another graph");
    node.needs_grad = node.needs_grad || nodes_[in.id()].needs_grad;
  }
  if (node.needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Tensor &Graph::value(Var v) const {
  const Node &node = nodes_[v.id()];
  return node.param != nullptr ? *node.param : node.own;
}

std::span<double> Graph::grad(Var v) {
  Node &node = nodes_[v.id()];
  if (!node.needs_grad) return {};
  if (node.param != nullptr) return node.param->mutable_grad();
  if (node.grad.empty()) node.grad.assign(node.own.size(), 0.0);
  return node.grad;
}

void Graph::Backward(Var loss) {
  if (backpropagated_) {
    throw std::logic_error("Backward called twice on the same graph without Reset()");
  }
  if (value(loss).size() != 1) throw std::invalid_argument("Backward requires a scalar output");
  backpropagated_ = true;
  if (!needs_grad(loss)) return;
  grad(loss)[0] += 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node &node = nodes_[i];
    if (!node.backward || node.grad.empty()) continue;
    node.backward(*this, node.grad);
  }
}

void Graph::Reset() {
  nodes_.clear();
  backpropagated_ = false;
}

}  // namespace subevent::ad
