#include "subevent/autodiff/tensor.h"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace subevent::ad {

std::size_t NumElements(const Shape &shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape &shape) { return fmt::format("[{}]", fmt::join(shape, "x")); }

Tensor::Tensor(Shape shape, bool requires_grad)
    : shape_(std::move(shape)), values_(NumElements(shape_), 0.0), requires_grad_(requires_grad) {}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : shape_(std::move(shape)), values_(std::move(values)), requires_grad_(requires_grad) {
  if (values_.size() != NumElements(shape_)) {
    throw std::invalid_argument(fmt::format("tensor of shape {} given {} values",
                                            ShapeToString(shape_), values_.size()));
  }
}

Tensor Tensor::Vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(n * m);
  for (const auto &row : rows) {
    if (row.size() != m) throw std::invalid_argument("ragged matrix literal");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor({n, m}, std::move(values));
}

void Tensor::set_requires_grad(bool value) {
  requires_grad_ = value;
  if (!value) grad_.clear();
}

std::span<double> Tensor::mutable_grad() {
  if (grad_.size() != values_.size()) grad_.assign(values_.size(), 0.0);
  return grad_;
}

void Tensor::ZeroGrad() {
  if (!grad_.empty()) std::fill(grad_.begin(), grad_.end(), 0.0);
}

void Tensor::Fill(double value) { std::fill(values_.begin(), values_.end(), value); }

}  // namespace subevent::ad
