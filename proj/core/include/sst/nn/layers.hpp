#pragma once

#include <cstddef>
#include <string>

#include "sst/autodiff/graph.hpp"
#include "sst/autodiff/ops.hpp"
#include "sst/rng.hpp"

// Transformer building blocks over the autodiff graph. Each block holds store
// indices only; the weights live in the ParameterStore.
namespace sst::nn {

using ad::Graph;
using ad::ParameterStore;
using ad::Var;

struct Linear {
  std::size_t weight = 0;
  std::size_t bias = 0;
  bool has_bias = true;

  static Linear create(ParameterStore& store, const std::string& name, std::size_t in,
                       std::size_t out, Rng& rng, bool bias = true);
  Var operator()(Graph& g, Var x) const;
};

struct LayerNorm {
  std::size_t gain = 0;
  std::size_t bias = 0;

  static LayerNorm create(ParameterStore& store, const std::string& name, std::size_t dim);
  Var operator()(Graph& g, Var x) const;
};

struct MultiHeadAttention {
  Linear query, key, value, out;
  std::size_t heads = 1;

  static MultiHeadAttention create(ParameterStore& store, const std::string& name,
                                   std::size_t dim, std::size_t heads, Rng& rng);
  // `mask` is additive with shape [queries, keys]; nullptr means all-visible.
  Var operator()(Graph& g, Var queries, Var memory, const Tensor* mask = nullptr) const;
};

struct FeedForward {
  Linear up, down;

  static FeedForward create(ParameterStore& store, const std::string& name, std::size_t dim,
                            std::size_t hidden, Rng& rng);
  Var operator()(Graph& g, Var x) const;
};

// Pre-norm encoder block: x + SelfAttn(LN(x)), then x + FFN(LN(x)).
struct EncoderLayer {
  LayerNorm norm_attn, norm_ff;
  MultiHeadAttention self_attn;
  FeedForward ff;

  static EncoderLayer create(ParameterStore& store, const std::string& name, std::size_t dim,
                             std::size_t heads, std::size_t ff_dim, Rng& rng);
  Var operator()(Graph& g, Var x, const Tensor* mask = nullptr) const;
};

// Pre-norm decoder block with self-attention (optionally masked) and
// cross-attention over `memory`.
struct DecoderLayer {
  LayerNorm norm_self, norm_cross, norm_ff;
  MultiHeadAttention self_attn, cross_attn;
  FeedForward ff;

  static DecoderLayer create(ParameterStore& store, const std::string& name, std::size_t dim,
                             std::size_t heads, std::size_t ff_dim, Rng& rng);
  Var operator()(Graph& g, Var x, Var memory, const Tensor* self_mask = nullptr) const;
};

// Additive mask hiding keys j > i from query i.
Tensor causal_mask(std::size_t n);

}  // namespace sst::nn
