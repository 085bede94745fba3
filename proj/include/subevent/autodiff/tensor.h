#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace subevent::ad {

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape &shape);
std::string ShapeToString(const Shape &shape);

// Dense row-major array of doubles. A tensor that requires a gradient owns a
// same-shape gradient buffer, allocated on first use.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, bool requires_grad = false);
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor Zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor Scalar(double value) { return Tensor({1}, std::vector<double>{value}); }
  static Tensor Vector(std::initializer_list<double> values);
  static Tensor Matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double &operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double &at(std::size_t row, std::size_t col) { return values_[row * shape_.back() + col]; }
  double at(std::size_t row, std::size_t col) const {
    return values_[row * shape_.back() + col];
  }

  bool requires_grad() const { return requires_grad_; }
  void set_requires_grad(bool value);

  bool has_grad() const { return !grad_.empty() || values_.empty(); }
  // Allocates a zero gradient if none exists yet.
  std::span<double> mutable_grad();
  std::span<const double> grad() const { return grad_; }
  void ZeroGrad();
  void DropGrad() { grad_.clear(); }

  void Fill(double value);

  friend bool operator==(const Tensor &a, const Tensor &b) {
    return a.shape_ == b.shape_ && a.values_ == b.values_;
  }

 private:
  Shape shape_;
  std::vector<double> values_;
  std::vector<double> grad_;
  bool requires_grad_ = false;
};

}  // namespace subevent::ad
