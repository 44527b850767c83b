#include "sst/autodiff/graph.hpp"

#include <sstream>

#include "sst/error.hpp"

namespace sst::ad {

const Tensor& Var::value() const {
  if (!valid()) throw Error("value() on an unbound Var");
  return graph_->value(*this);
}

Graph::Graph(ParameterStore* store, std::uint64_t seed, bool track_gradients)
    : store_(store), seed_(seed), track_gradients_(track_gradients) {}

int Graph::push(Node node) {
  if (backward_done_) throw Error("graph is frozen after backward(); build a new graph");
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size() - 1);
}

Var Graph::constant(Tensor value, std::string name) {
  Node n;
  n.op = std::move(name);
  n.value = std::move(value);
  return {this, push(std::move(n))};
}

Var Graph::variable(Tensor value, std::string name) {
  Node n;
  n.op = std::move(name);
  n.value = std::move(value);
  n.requires_grad = true;
  return {this, push(std::move(n))};
}

Var Graph::param(std::size_t store_index) {
  if (store_ == nullptr) throw Error("graph has no parameter store");
  if (auto it = param_nodes_.find(store_index); it != param_nodes_.end()) {
    return {this, it->second};
  }
  Node n;
  n.op = "param:" + store_->name(store_index);
  n.external = &store_->value(store_index);
  n.requires_grad = track_gradients_;
  n.param_index = static_cast<long>(store_index);
  const int id = push(std::move(n));
  param_nodes_.emplace(store_index, id);
  return {this, id};
}

Var Graph::param(std::string_view name) {
  if (store_ == nullptr) throw Error("graph has no parameter store");
  return param(store_->index(name));
}

Var Graph::record(std::string op, Tensor value, std::vector<int> inputs, BackwardFn backward) {
  if (!value.all_finite()) {
    throw Error("non-finite value produced by node '" + op + "' (#" +
                std::to_string(nodes_.size()) + ")");
  }
  Node n;
  n.op = std::move(op);
  n.value = std::move(value);
  for (int in : inputs) {
    if (in < 0 || in >= static_cast<int>(nodes_.size())) {
      throw Error("node '" + n.op + "' references a foreign or missing input");
    }
    n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
  }
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backward = std::move(backward);
  return {this, push(std::move(n))};
}

const Tensor& Graph::value_at(int id) const {
  const Node& n = nodes_.at(id);
  return n.external != nullptr ? *n.external : n.value;
}

Tensor Graph::grad(Var v) const {
  const Node& n = nodes_.at(v.id());
  if (!n.grad.empty()) return n.grad;
  const Tensor& val = value_at(v.id());
  return Tensor::matrix(val.rows(), val.cols());
}

Tensor& Graph::grad_accumulator(int id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) {
    const Tensor& v = value_at(id);
    n.grad = Tensor::matrix(v.rows(), v.cols());
  }
  return n.grad;
}

void Graph::backward(Var loss) {
  if (loss.graph() != this || !loss.valid()) {
    throw Error("backward(): loss node is not on this graph (was forward run?)");
  }
  if (backward_done_) throw Error("backward() already ran on this graph");
  const Tensor& lv = value_at(loss.id());
  if (lv.size() != 1) {
    std::ostringstream os;
    os << "backward(): loss must be scalar, node '" << nodes_[loss.id()].op << "' has "
       << lv.size() << " values";
    throw Error(os.str());
  }
  backward_done_ = true;
  grad_accumulator(loss.id())[0] = 1.0;
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, id);
  }
}

void Graph::collect_gradients(Gradients& out) const {
  if (!backward_done_) throw Error("collect_gradients(): backward() has not run");
  for (const auto& [store_index, node_id] : param_nodes_) {
    const Node& n = nodes_[node_id];
    if (!n.grad.empty()) out.accumulate(store_index, n.grad);
  }
}

}  // namespace sst::ad
