#include "sst/autodiff/parameters.hpp"

#include <cmath>

#include "sst/error.hpp"
#include "sst/rng.hpp"

namespace sst::ad {

std::size_t ParameterStore::add(std::string name, Tensor init) {
  if (by_name_.contains(name)) throw Error("duplicate parameter name: " + name);
  const std::size_t idx = entries_.size();
  by_name_.emplace(name, idx);
  entries_.push_back({std::move(name), std::move(init)});
  return idx;
}

std::size_t ParameterStore::add_xavier(std::string name, std::size_t rows, std::size_t cols,
                                       Rng& rng) {
  Tensor t = Tensor::matrix(rows, cols);
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (double& v : t.values()) v = rng.uniform(-a, a);
  return add(std::move(name), std::move(t));
}

std::size_t ParameterStore::add_constant(std::string name, std::size_t rows, std::size_t cols,
                                         double value) {
  return add(std::move(name), Tensor::matrix(rows, cols, value));
}

std::size_t ParameterStore::index(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw Error("unknown parameter: " + std::string(name));
  return it->second;
}

bool ParameterStore::contains(std::string_view name) const { return by_name_.contains(name); }

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

void ParameterStore::assign(const ParameterStore& other) {
  if (other.size() != size()) throw Error("parameter store size mismatch");
  for (std::size_t i = 0; i < size(); ++i) {
    if (other.name(i) != name(i) || other.value(i).shape() != value(i).shape()) {
      throw Error("parameter mismatch at " + name(i));
    }
    entries_[i].value = other.value(i);
  }
}

Gradients::Gradients(const ParameterStore& store) : grads_(store.size()) {}

void Gradients::accumulate(std::size_t index, const Tensor& grad) {
  Tensor& g = grads_.at(index);
  if (g.empty()) {
    g = grad;
    return;
  }
  if (!g.same_shape(grad)) throw Error("gradient shape mismatch");
  g.mat() += grad.mat();
}

void Gradients::add(const Gradients& other) {
  if (other.size() != size()) throw Error("gradient set size mismatch");
  for (std::size_t i = 0; i < size(); ++i) {
    if (!other.grads_[i].empty()) accumulate(i, other.grads_[i]);
  }
}

void Gradients::scale(double factor) {
  for (auto& g : grads_) {
    for (double& v : g.values()) v *= factor;
  }
}

void Gradients::clear() {
  for (auto& g : grads_) g = Tensor();
}

double Gradients::global_norm() const {
  double sq = 0.0;
  for (const auto& g : grads_) {
    for (double v : g.values()) sq += v * v;
  }
  return std::sqrt(sq);
}

}  // namespace sst::ad
