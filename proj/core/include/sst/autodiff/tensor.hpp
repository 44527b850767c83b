#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace sst {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense 64-bit tensor stored as a flat row-major buffer.
//
// Graph operations treat every tensor as a matrix: rank 0 is 1x1, rank 1 is a
// 1xN row, rank 2 is RxC. Higher ranks are only carried (e.g. in checkpoints).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static Tensor scalar(double value);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor from_matrix(const RowMatrix& m);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::size_t rows() const;
  std::size_t cols() const;

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  Eigen::Map<RowMatrix> mat();
  Eigen::Map<const RowMatrix> mat() const;

  double item() const;
  bool all_finite() const;
  bool same_shape(const Tensor& other) const;

  friend bool operator==(const Tensor& a, const Tensor& b) = default;

 private:
  std::vector<std::size_t> shape_;
  // Aligned storage keeps Eigen's vectorized reductions on the same code path
  // for every allocation, so results do not depend on heap addresses.
  std::vector<double, Eigen::aligned_allocator<double>> values_;
};

std::size_t shape_product(std::span<const std::size_t> shape);

}  // namespace sst
