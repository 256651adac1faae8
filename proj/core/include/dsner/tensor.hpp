#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dsner {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);

/// Dense row-major tensor of 64-bit floats with an optional same-shape
/// gradient accumulator. The shape is fixed after construction.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double v);
  static Tensor scalar(double v);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t ndim() const { return shape_.size(); }
  std::size_t numel() const { return data_.size(); }
  std::size_t dim(std::size_t i) const { return shape_[i]; }
  std::size_t rows() const { return shape_[0]; }
  std::size_t cols() const { return shape_[1]; }
  bool is_scalar() const { return data_.size() == 1 && shape_.size() <= 1; }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

  /// Gradient accumulator; allocated as zeros on first access.
  std::vector<double>& grad();
  const std::vector<double>& grad() const { return grad_; }
  bool has_grad() const { return !grad_.empty(); }
  void zero_grad();
  void fill(double v);

  bool all_finite() const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

 private:
  Shape shape_;
  std::vector<double> data_;
  std::vector<double> grad_;
};

/// A named handle on a trainable tensor; the unit the optimizer and the
/// model archive work with.
struct NamedParam {
  std::string name;
  Tensor* tensor = nullptr;
};

}  // namespace dsner
