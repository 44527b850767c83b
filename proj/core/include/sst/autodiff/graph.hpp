#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sst/autodiff/parameters.hpp"
#include "sst/autodiff/tensor.hpp"

namespace sst::ad {

class Graph;

// Handle to a node recorded on a Graph.
class Var {
 public:
  Var() = default;

  Graph* graph() const { return graph_; }
  int id() const { return id_; }
  bool valid() const { return graph_ != nullptr && id_ >= 0; }

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  friend class Graph;
  Var(Graph* g, int id) : graph_(g), id_(id) {}

  Graph* graph_ = nullptr;
  int id_ = -1;
};

// Define-by-run tape. Every op evaluates eagerly and records a backward
// closure; backward() replays the tape in reverse topological (recording)
// order, visiting each node once.
//
// A Graph is single-writer. Parameter leaves reference the store's tensors
// directly, so the store must outlive the graph and must not be mutated while
// the graph is alive.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, int self)>;

  // With `track_gradients` false, parameter leaves do not require gradients
  // and no backward closures are kept (inference mode).
  explicit Graph(ParameterStore* store = nullptr, std::uint64_t seed = 0,
                 bool track_gradients = true);

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value, std::string name = "constant");
  // Leaf that receives a gradient but is not a stored parameter.
  Var variable(Tensor value, std::string name = "variable");
  Var param(std::size_t store_index);
  Var param(std::string_view name);

  // Records an op node. `inputs` must already be on this graph. When no input
  // requires a gradient the backward closure is dropped.
  Var record(std::string op, Tensor value, std::vector<int> inputs, BackwardFn backward);

  void backward(Var loss);

  const Tensor& value(Var v) const { return value_at(v.id()); }
  // Gradient of the last backward() loss w.r.t. v (zeros when unreached).
  Tensor grad(Var v) const;

  // Accumulates parameter gradients of the last backward() into `out`.
  void collect_gradients(Gradients& out) const;

  std::size_t size() const { return nodes_.size(); }
  std::uint64_t seed() const { return seed_; }
  ParameterStore* store() const { return store_; }
  bool backward_done() const { return backward_done_; }
  const std::string& op_name(int id) const { return nodes_.at(id).op; }

  // Accessors used by backward closures.
  const Tensor& value_at(int id) const;
  const Tensor& grad_at(int id) const { return nodes_[id].grad; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  // Zero-initialized on first touch.
  Tensor& grad_accumulator(int id);

 private:
  struct Node {
    std::string op;
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    std::vector<int> inputs;
    BackwardFn backward;
    bool requires_grad = false;
    long param_index = -1;
  };

  int push(Node node);

  ParameterStore* store_;
  std::uint64_t seed_;
  bool track_gradients_;
  std::vector<Node> nodes_;
  std::unordered_map<std::size_t, int> param_nodes_;
  bool backward_done_ = false;
};

}  // namespace sst::ad
