#include "sst/suggest/model.hpp"

#include <algorithm>
#include <string>

#include "sst/error.hpp"
#include "sst/world/vocabulary.hpp"

namespace sst::suggest {

using ad::Var;

SuggesterModel::SuggesterModel(const SuggesterConfig& config, std::uint64_t seed)
    : config_(config) {
  if (config.vocab_size <= static_cast<std::size_t>(world::Vocabulary::kNumSpecial)) {
    throw Error("suggester: vocabulary has no regular units");
  }
  if (config.max_units == 0) throw Error("suggester: max_units must be positive");
  Rng rng(seed);
  const std::size_t h = config.hidden;
  bit_width_ = codeword_width(config.vocab_size);

  grid_in_ = nn::Linear::create(store_, "enc.in", world::kFeatureDim, h, rng);
  for (std::size_t i = 0; i < config.layers; ++i) {
    encoder_.push_back(nn::EncoderLayer::create(store_, "enc." + std::to_string(i), h,
                                                config.heads, config.ff_dim, rng));
  }
  encoder_norm_ = nn::LayerNorm::create(store_, "enc.ln", h);
  if (!config.share_length_encoder) {
    for (std::size_t i = 0; i < config.layers; ++i) {
      length_encoder_.push_back(nn::EncoderLayer::create(store_, "len." + std::to_string(i), h,
                                                         config.heads, config.ff_dim, rng));
    }
    length_norm_ = nn::LayerNorm::create(store_, "len.ln", h);
  }
  length_weight_ = store_.add_xavier("len.w", h, config.max_units, rng);

  if (is_discrete(config.framework)) {
    token_embedding_ = store_.add_xavier("dec.tok", config.vocab_size, h, rng);
  } else {
    bits_in_ = nn::Linear::create(store_, "dec.bits", bit_width_, h, rng);
  }
  position_embedding_ = store_.add_xavier("dec.pos", config.max_units, h, rng);
  step_embedding_ = store_.add_xavier("dec.step", static_cast<std::size_t>(config.diffusion_steps) + 1, h, rng);
  for (std::size_t i = 0; i < config.layers; ++i) {
    decoder_.push_back(nn::DecoderLayer::create(store_, "dec." + std::to_string(i), h,
                                                config.heads, config.ff_dim, rng));
  }
  decoder_norm_ = nn::LayerNorm::create(store_, "dec.ln", h);
  const std::size_t out = is_discrete(config.framework) ? config.vocab_size : bit_width_;
  head_ = nn::Linear::create(store_, "dec.head", h, out, rng);
}

Var SuggesterModel::encode(ad::Graph& g, const Tensor& grid) const {
  if (grid.cols() != static_cast<std::size_t>(world::kFeatureDim)) {
    throw Error("suggester.encode: feature grid has the wrong width");
  }
  Var x = grid_in_(g, g.constant(grid, "grid"));
  for (const auto& layer : encoder_) x = layer(g, x);
  return encoder_norm_(g, x);
}

Var SuggesterModel::length_logits(ad::Graph& g, Var encoded) const {
  Var x = encoded;
  const auto& stack = config_.share_length_encoder ? encoder_ : length_encoder_;
  for (const auto& layer : stack) x = layer(g, x);
  if (!config_.share_length_encoder) x = length_norm_(g, x);
  return ad::matmul(ad::mean_rows(x), g.param(length_weight_));
}

Var SuggesterModel::denoise(ad::Graph& g, Var encoded, const NoisyState& state) const {
  const std::size_t len = state.length();
  if (len == 0) throw Error("suggester.denoise: empty sequence");
  if (len > config_.max_units) {
    throw Error("suggester.denoise: sequence of " + std::to_string(len) +
                " exceeds the maximum of " + std::to_string(config_.max_units));
  }
  if (state.t < 0 || state.t > config_.diffusion_steps) throw Error("suggester.denoise: bad step");
  Var x;
  if (is_discrete(config_.framework)) {
    if (state.tokens.empty()) throw Error("suggester.denoise: discrete state has no tokens");
    x = ad::embedding(g.param(token_embedding_), state.tokens);
  } else {
    if (state.bits.cols() != bit_width_) throw Error("suggester.denoise: bit width mismatch");
    x = bits_in_(g, g.constant(state.bits, "bits"));
  }
  std::vector<int> positions(len);
  for (std::size_t i = 0; i < len; ++i) positions[i] = static_cast<int>(i);
  const int step[] = {state.t};
  x = ad::add(x, ad::embedding(g.param(position_embedding_), positions));
  x = ad::add(x, ad::repeat_rows(ad::embedding(g.param(step_embedding_), step), len));
  for (const auto& layer : decoder_) x = layer(g, x, encoded);
  return head_(g, decoder_norm_(g, x));
}

Tensor SuggesterModel::denoise_logits(const Tensor& grid, const NoisyState& state) const {
  ad::Graph g(&store_, 0, false);
  return denoise(g, encode(g, grid), state).value();
}

std::size_t SuggesterModel::predict_length(const Tensor& grid) const {
  ad::Graph g(&store_, 0, false);
  const Tensor logits = length_logits(g, encode(g, grid)).value();
  const auto v = logits.values();
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin()) + 1;
}

}  // namespace sst::suggest
