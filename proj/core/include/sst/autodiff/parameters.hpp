#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sst/autodiff/tensor.hpp"

namespace sst {
class Rng;
}

namespace sst::ad {

// Named, ordered collection of learned tensors. Addresses are stable for the
// lifetime of the store, so graphs may reference values without copying.
class ParameterStore {
 public:
  std::size_t add(std::string name, Tensor init);
  // Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
  std::size_t add_xavier(std::string name, std::size_t rows, std::size_t cols, Rng& rng);
  std::size_t add_constant(std::string name, std::size_t rows, std::size_t cols, double value);

  std::size_t index(std::string_view name) const;
  bool contains(std::string_view name) const;

  const std::string& name(std::size_t i) const { return entries_.at(i).name; }
  const Tensor& value(std::size_t i) const { return entries_.at(i).value; }
  Tensor& value(std::size_t i) { return entries_.at(i).value; }
  const Tensor& value(std::string_view name) const { return value(index(name)); }
  Tensor& value(std::string_view name) { return value(index(name)); }

  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;

  // Copies every value from `other`; names and shapes must agree.
  void assign(const ParameterStore& other);

 private:
  struct Entry {
    std::string name;
    Tensor value;
  };
  std::deque<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
};

// Gradient buffers aligned with ParameterStore indices. Untouched entries stay
// empty until a graph contributes to them.
class Gradients {
 public:
  explicit Gradients(const ParameterStore& store);

  void accumulate(std::size_t index, const Tensor& grad);
  void add(const Gradients& other);
  void scale(double factor);
  void clear();

  const Tensor& at(std::size_t i) const { return grads_.at(i); }
  Tensor& at(std::size_t i) { return grads_.at(i); }
  std::size_t size() const { return grads_.size(); }
  double global_norm() const;

 private:
  std::vector<Tensor> grads_;
};

}  // namespace sst::ad
