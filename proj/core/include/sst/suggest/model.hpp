#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sst/autodiff/graph.hpp"
#include "sst/nn/layers.hpp"
#include "sst/suggest/diffusion.hpp"
#include "sst/world/scene.hpp"
#include "sst/world/token_set.hpp"

namespace sst::suggest {

struct SuggesterConfig {
  std::size_t vocab_size = 0;
  std::size_t hidden = 128;
  std::size_t layers = 3;
  std::size_t heads = 4;
  std::size_t ff_dim = 256;
  int diffusion_steps = 20;
  std::size_t max_units = world::kMaxSuggestions;
  Framework framework = Framework::reparametrized;
  // Analog-bit only: adds the length-penalty term and caps sampled units by
  // the length head.
  bool length_penalty = false;
  // Length head reuses the denoiser encoder stack instead of its own.
  bool share_length_encoder = false;
};

// Transformer encoder-decoder denoiser over suggestion sequences plus the
// length classifier over {1..max_units}.
//
// The decoder's self-attention is bidirectional. Inputs are token embeddings
// (discrete) or projected codewords (analog-bit), plus learned position and
// diffusion-step embeddings.
class SuggesterModel {
 public:
  SuggesterModel(const SuggesterConfig& config, std::uint64_t seed);

  const SuggesterConfig& config() const { return config_; }
  ad::ParameterStore& parameters() { return store_; }
  const ad::ParameterStore& parameters() const { return store_; }
  std::size_t bit_width() const { return bit_width_; }
  // Sequence positions fed to the decoder during training and sampling for
  // analog-bit (fixed) frameworks.
  std::size_t analog_positions() const { return config_.max_units; }

  ad::Var encode(ad::Graph& g, const Tensor& grid) const;
  // [1 x max_units] logits; class k means length k + 1.
  ad::Var length_logits(ad::Graph& g, ad::Var encoded) const;
  // [length x vocab] token logits (discrete) or [length x bits] bit logits.
  ad::Var denoise(ad::Graph& g, ad::Var encoded, const NoisyState& state) const;

  // Inference helpers on a gradient-free graph.
  Tensor denoise_logits(const Tensor& grid, const NoisyState& state) const;
  std::size_t predict_length(const Tensor& grid) const;

 private:
  SuggesterConfig config_;
  std::size_t bit_width_ = 0;
  mutable ad::ParameterStore store_;

  nn::Linear grid_in_;
  std::vector<nn::EncoderLayer> encoder_;
  nn::LayerNorm encoder_norm_;
  std::vector<nn::EncoderLayer> length_encoder_;
  nn::LayerNorm length_norm_;
  std::size_t length_weight_ = 0;
  std::size_t token_embedding_ = 0;
  nn::Linear bits_in_;
  std::size_t position_embedding_ = 0;
  std::size_t step_embedding_ = 0;
  std::vector<nn::DecoderLayer> decoder_;
  nn::LayerNorm decoder_norm_;
  nn::Linear head_;
};

}  // namespace sst::suggest
