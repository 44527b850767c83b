#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sst/autodiff/graph.hpp"
#include "sst/nn/layers.hpp"

namespace sst::caption {

// Where suggestions enter the captioner.
//   none: plain encoder-decoder transformer.
//   A: cross-attention over all suggestion rows, before every decoder layer.
//   B: cross-attention over all suggestion rows, before every encoder layer.
//   C: reduce + concatenate + project, before every encoder layer.
//   D: reduce + concatenate + project, before every decoder layer.
enum class Integration { none, A, B, C, D };

Integration parse_integration(std::string_view name);
std::string_view integration_name(Integration v);

// One suggestion unit as the captioner word ids it spans (a single id for
// word units, several for n-grams).
using SuggestionUnits = std::vector<std::vector<int>>;

struct CaptionerConfig {
  std::size_t vocab_size = 0;
  std::size_t hidden = 64;
  std::size_t layers = 3;
  std::size_t heads = 4;
  std::size_t ff_dim = 128;
  // Longest decoder input, BOS included (16 words + BOS + EOS slack).
  std::size_t max_len = 18;
  Integration integration = Integration::D;
  // One reduce weight for all layers instead of one per layer.
  bool share_reduce_weight = false;
};

// Encoder output plus the suggestion rows P (invalid Var when no suggestions
// are given).
struct Encoded {
  ad::Var memory;
  ad::Var suggestions;
};

class CaptionerModel {
 public:
  CaptionerModel(const CaptionerConfig& config, std::uint64_t seed);

  const CaptionerConfig& config() const { return config_; }
  ad::ParameterStore& parameters() { return store_; }
  const ad::ParameterStore& parameters() const { return store_; }

  // P: one row per unit, the mean of the captioner embeddings of its words.
  ad::Var suggestion_rows(ad::Graph& g, const SuggestionUnits& units) const;

  // softmax(P w) weighted rows of P, averaged over the S rows -> [1 x H].
  ad::Var reduce(ad::Graph& g, ad::Var p, std::size_t layer) const;

  // Applies layer `layer`'s integration to activations x (decoder activations
  // for A/D, encoder activations for B/C). Without suggestions the learned
  // null vector (C/D) or null row (A/B) stands in. Identity for `none`.
  ad::Var integrate(ad::Graph& g, ad::Var x, ad::Var p, std::size_t layer) const;

  // `units` may be null (suggestions withheld).
  Encoded encode(ad::Graph& g, const Tensor& grid, const SuggestionUnits* units) const;
  // Next-token logits for every prefix position, [prefix x vocab]. The prefix
  // starts with BOS and holds at most max_len ids.
  ad::Var decode(ad::Graph& g, const Encoded& encoded, std::span<const int> prefix) const;

  ad::Var forward(ad::Graph& g, const Tensor& grid, std::span<const int> prefix,
                  const SuggestionUnits* units) const;

  // Store indices of the integration weights of a layer (tests poke these).
  std::size_t reduce_weight(std::size_t layer) const;
  std::size_t project_weight(std::size_t layer) const { return project_.at(layer); }
  std::size_t null_vector() const { return null_; }
  std::size_t token_embedding() const { return token_embedding_; }

 private:
  bool encoder_side() const;

  CaptionerConfig config_;
  mutable ad::ParameterStore store_;

  nn::Linear grid_in_;
  std::vector<nn::EncoderLayer> encoder_;
  nn::LayerNorm encoder_norm_;
  std::size_t token_embedding_ = 0;
  std::size_t position_embedding_ = 0;
  std::vector<nn::DecoderLayer> decoder_;
  nn::LayerNorm decoder_norm_;

  std::vector<std::size_t> reduce_;   // [1 x H] each
  std::vector<std::size_t> project_;  // [2H x H] each, initialized [I; 0]
  std::vector<nn::MultiHeadAttention> cross_;
  std::vector<nn::LayerNorm> cross_norm_;
  std::size_t null_ = 0;
};

// Summed negative log-likelihood of `targets` under row-wise logits; PAD
// targets are skipped. Throws for ids outside the vocabulary.
ad::Var xe_loss(ad::Var logits, std::span<const int> targets);

}  // namespace sst::caption
