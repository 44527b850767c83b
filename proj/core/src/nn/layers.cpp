#include "sst/nn/layers.hpp"

#include <vector>

#include "sst/error.hpp"

namespace sst::nn {

Linear Linear::create(ParameterStore& store, const std::string& name, std::size_t in,
                      std::size_t out, Rng& rng, bool bias) {
  Linear l;
  l.weight = store.add_xavier(name + ".w", in, out, rng);
  l.has_bias = bias;
  if (bias) l.bias = store.add_constant(name + ".b", 1, out, 0.0);
  return l;
}

Var Linear::operator()(Graph& g, Var x) const {
  Var y = ad::matmul(x, g.param(weight));
  return has_bias ? ad::add_row(y, g.param(bias)) : y;
}

LayerNorm LayerNorm::create(ParameterStore& store, const std::string& name, std::size_t dim) {
  return {store.add_constant(name + ".gain", 1, dim, 1.0),
          store.add_constant(name + ".bias", 1, dim, 0.0)};
}

Var LayerNorm::operator()(Graph& g, Var x) const {
  return ad::layer_norm(x, g.param(gain), g.param(bias));
}

MultiHeadAttention MultiHeadAttention::create(ParameterStore& store, const std::string& name,
                                              std::size_t dim, std::size_t heads, Rng& rng) {
  if (heads == 0 || dim % heads != 0) throw Error(name + ": hidden size not divisible by heads");
  MultiHeadAttention m;
  m.query = Linear::create(store, name + ".q", dim, dim, rng);
  m.key = Linear::create(store, name + ".k", dim, dim, rng);
  m.value = Linear::create(store, name + ".v", dim, dim, rng);
  m.out = Linear::create(store, name + ".o", dim, dim, rng);
  m.heads = heads;
  return m;
}

Var MultiHeadAttention::operator()(Graph& g, Var queries, Var memory, const Tensor* mask) const {
  Var q = query(g, queries);
  Var k = key(g, memory);
  Var v = value(g, memory);
  if (heads == 1) return out(g, ad::attention(q, k, v, mask));
  const std::size_t dh = q.cols() / heads;
  std::vector<Var> parts;
  parts.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    parts.push_back(ad::attention(ad::slice_cols(q, h * dh, dh), ad::slice_cols(k, h * dh, dh),
                                  ad::slice_cols(v, h * dh, dh), mask));
  }
  return out(g, ad::concat_cols(parts));
}

FeedForward FeedForward::create(ParameterStore& store, const std::string& name, std::size_t dim,
                                std::size_t hidden, Rng& rng) {
  return {Linear::create(store, name + ".up", dim, hidden, rng),
          Linear::create(store, name + ".down", hidden, dim, rng)};
}

Var FeedForward::operator()(Graph& g, Var x) const { return down(g, ad::gelu(up(g, x))); }

EncoderLayer EncoderLayer::create(ParameterStore& store, const std::string& name,
                                  std::size_t dim, std::size_t heads, std::size_t ff_dim,
                                  Rng& rng) {
  EncoderLayer l;
  l.norm_attn = LayerNorm::create(store, name + ".ln_attn", dim);
  l.self_attn = MultiHeadAttention::create(store, name + ".attn", dim, heads, rng);
  l.norm_ff = LayerNorm::create(store, name + ".ln_ff", dim);
  l.ff = FeedForward::create(store, name + ".ff", dim, ff_dim, rng);
  return l;
}

Var EncoderLayer::operator()(Graph& g, Var x, const Tensor* mask) const {
  Var h = norm_attn(g, x);
  x = ad::add(x, self_attn(g, h, h, mask));
  return ad::add(x, ff(g, norm_ff(g, x)));
}

DecoderLayer DecoderLayer::create(ParameterStore& store, const std::string& name,
                                  std::size_t dim, std::size_t heads, std::size_t ff_dim,
                                  Rng& rng) {
  DecoderLayer l;
  l.norm_self = LayerNorm::create(store, name + ".ln_self", dim);
  l.self_attn = MultiHeadAttention::create(store, name + ".self", dim, heads, rng);
  l.norm_cross = LayerNorm::create(store, name + ".ln_cross", dim);
  l.cross_attn = MultiHeadAttention::create(store, name + ".cross", dim, heads, rng);
  l.norm_ff = LayerNorm::create(store, name + ".ln_ff", dim);
  l.ff = FeedForward::create(store, name + ".ff", dim, ff_dim, rng);
  return l;
}

Var DecoderLayer::operator()(Graph& g, Var x, Var memory, const Tensor* self_mask) const {
  Var h = norm_self(g, x);
  x = ad::add(x, self_attn(g, h, h, self_mask));
  x = ad::add(x, cross_attn(g, norm_cross(g, x), memory));
  return ad::add(x, ff(g, norm_ff(g, x)));
}

Tensor causal_mask(std::size_t n) {
  Tensor m = Tensor::matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = -1e9;
  }
  return m;
}

}  // namespace sst::nn
