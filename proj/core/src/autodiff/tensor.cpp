#include "sst/autodiff/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "sst/error.hpp"

namespace sst {

std::size_t shape_product(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), values_(shape_product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()) {
  if (shape_product(shape_) != values_.size()) {
    std::ostringstream os;
    os << "tensor shape product " << shape_product(shape_) << " != value count "
       << values_.size();
    throw Error(os.str());
  }
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, double fill) {
  return Tensor({rows, cols}, fill);
}

Tensor Tensor::scalar(double value) { return Tensor({1, 1}, value); }

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw Error("from_rows: ragged rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(values));
}

Tensor Tensor::from_matrix(const RowMatrix& m) {
  Tensor t = matrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  t.mat() = m;
  return t;
}

std::size_t Tensor::rows() const {
  if (shape_.size() == 2) return shape_[0];
  if (shape_.size() <= 1) return 1;
  throw Error("rows(): tensor rank > 2 has no matrix view");
}

std::size_t Tensor::cols() const {
  if (shape_.size() == 2) return shape_[1];
  if (shape_.size() == 1) return shape_[0];
  if (shape_.empty()) return 1;
  throw Error("cols(): tensor rank > 2 has no matrix view");
}

Eigen::Map<RowMatrix> Tensor::mat() {
  return {values_.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
}

Eigen::Map<const RowMatrix> Tensor::mat() const {
  return {values_.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
}

double Tensor::item() const {
  if (values_.size() != 1) throw Error("item(): tensor is not a scalar");
  return values_[0];
}

bool Tensor::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool Tensor::same_shape(const Tensor& other) const {
  return rows() == other.rows() && cols() == other.cols();
}

}  // namespace sst
