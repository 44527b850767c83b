#include "sst/caption/model.hpp"

#include <string>

#include "sst/error.hpp"
#include "sst/world/scene.hpp"
#include "sst/world/vocabulary.hpp"

namespace sst::caption {

using ad::Var;
using world::Vocabulary;

Integration parse_integration(std::string_view name) {
  if (name == "none") return Integration::none;
  if (name == "A") return Integration::A;
  if (name == "B") return Integration::B;
  if (name == "C") return Integration::C;
  if (name == "D") return Integration::D;
  throw Error("unknown integration variant '" + std::string(name) + "' (none|A|B|C|D)");
}

std::string_view integration_name(Integration v) {
  switch (v) {
    case Integration::none: return "none";
    case Integration::A: return "A";
    case Integration::B: return "B";
    case Integration::C: return "C";
    case Integration::D: return "D";
  }
  return "?";
}

CaptionerModel::CaptionerModel(const CaptionerConfig& config, std::uint64_t seed)
    : config_(config) {
  if (config.vocab_size <= static_cast<std::size_t>(Vocabulary::kNumSpecial)) {
    throw Error("captioner: vocabulary has no regular units");
  }
  if (config.max_len < 2) throw Error("captioner: max_len must be at least 2");
  Rng rng(seed);
  const std::size_t h = config.hidden;

  grid_in_ = nn::Linear::create(store_, "cap.enc.in", world::kFeatureDim, h, rng);
  for (std::size_t i = 0; i < config.layers; ++i) {
    encoder_.push_back(nn::EncoderLayer::create(store_, "cap.enc." + std::to_string(i), h,
                                                config.heads, config.ff_dim, rng));
  }
  encoder_norm_ = nn::LayerNorm::create(store_, "cap.enc.ln", h);
  token_embedding_ = store_.add_xavier("cap.tok", config.vocab_size, h, rng);
  position_embedding_ = store_.add_xavier("cap.pos", config.max_len, h, rng);
  for (std::size_t i = 0; i < config.layers; ++i) {
    decoder_.push_back(nn::DecoderLayer::create(store_, "cap.dec." + std::to_string(i), h,
                                                config.heads, config.ff_dim, rng));
  }
  decoder_norm_ = nn::LayerNorm::create(store_, "cap.dec.ln", h);

  switch (config.integration) {
    case Integration::none:
      break;
    case Integration::C:
    case Integration::D: {
      const std::size_t n_reduce = config.share_reduce_weight ? 1 : config.layers;
      for (std::size_t i = 0; i < n_reduce; ++i) {
        reduce_.push_back(store_.add_constant("cap.int." + std::to_string(i) + ".wr", 1, h, 0.0));
      }
      for (std::size_t i = 0; i < config.layers; ++i) {
        Tensor wu = Tensor::matrix(2 * h, h);
        for (std::size_t d = 0; d < h; ++d) wu(d, d) = 1.0;
        project_.push_back(store_.add("cap.int." + std::to_string(i) + ".wu", std::move(wu)));
      }
      null_ = store_.add_constant("cap.int.null", 1, h, 0.0);
      break;
    }
    case Integration::A:
    case Integration::B:
      for (std::size_t i = 0; i < config.layers; ++i) {
        const std::string name = "cap.int." + std::to_string(i);
        cross_norm_.push_back(nn::LayerNorm::create(store_, name + ".ln", h));
        cross_.push_back(nn::MultiHeadAttention::create(store_, name + ".xattn", h, config.heads, rng));
      }
      null_ = store_.add_xavier("cap.int.null", 1, h, rng);
      break;
  }
}

bool CaptionerModel::encoder_side() const {
  return config_.integration == Integration::B || config_.integration == Integration::C;
}

std::size_t CaptionerModel::reduce_weight(std::size_t layer) const {
  return reduce_.at(config_.share_reduce_weight ? 0 : layer);
}

Var CaptionerModel::suggestion_rows(ad::Graph& g, const SuggestionUnits& units) const {
  if (units.empty()) throw Error("captioner: empty suggestion list");
  Var table = g.param(token_embedding_);
  std::vector<Var> rows;
  rows.reserve(units.size());
  for (const auto& unit : units) {
    if (unit.empty()) throw Error("captioner: suggestion unit without words");
    for (int id : unit) {
      if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) {
        throw Error("captioner: suggestion word id " + std::to_string(id) + " out of range");
      }
    }
    Var e = ad::embedding(table, unit);
    rows.push_back(unit.size() == 1 ? e : ad::mean_rows(e));
  }
  return rows.size() == 1 ? rows.front() : ad::concat_rows(rows);
}

Var CaptionerModel::reduce(ad::Graph& g, Var p, std::size_t layer) const {
  if (p.rows() == 0) throw Error("reduce: no suggestion rows");
  if (p.cols() != config_.hidden) throw Error("reduce: hidden-size mismatch");
  Var weights = ad::softmax_rows(ad::matmul_nt(g.param(reduce_weight(layer)), p));  // [1 x S]
  return ad::scale(ad::matmul(weights, p), 1.0 / static_cast<double>(p.rows()));
}

Var CaptionerModel::integrate(ad::Graph& g, Var x, Var p, std::size_t layer) const {
  if (x.cols() != config_.hidden) throw Error("integrate: hidden-size mismatch");
  switch (config_.integration) {
    case Integration::none:
      return x;
    case Integration::C:
    case Integration::D: {
      Var r = p.valid() ? reduce(g, p, layer) : g.param(null_);
      const Var parts[] = {x, ad::repeat_rows(r, x.rows())};
      return ad::matmul(ad::concat_cols(parts), g.param(project_.at(layer)));
    }
    case Integration::A:
    case Integration::B: {
      Var memory = p.valid() ? p : g.param(null_);
      if (memory.cols() != config_.hidden) throw Error("integrate: hidden-size mismatch");
      return ad::add(x, cross_.at(layer)(g, cross_norm_.at(layer)(g, x), memory));
    }
  }
  return x;
}

Encoded CaptionerModel::encode(ad::Graph& g, const Tensor& grid, const SuggestionUnits* units) const {
  if (grid.cols() != static_cast<std::size_t>(world::kFeatureDim)) {
    throw Error("captioner.encode: feature grid has the wrong width");
  }
  Encoded out;
  if (units != nullptr && !units->empty() && config_.integration != Integration::none) {
    out.suggestions = suggestion_rows(g, *units);
  }
  Var x = grid_in_(g, g.constant(grid, "grid"));
  for (std::size_t i = 0; i < encoder_.size(); ++i) {
    if (encoder_side()) x = integrate(g, x, out.suggestions, i);
    x = encoder_[i](g, x);
  }
  out.memory = encoder_norm_(g, x);
  return out;
}

Var CaptionerModel::decode(ad::Graph& g, const Encoded& encoded, std::span<const int> prefix) const {
  if (prefix.empty() || prefix.front() != Vocabulary::kBos) {
    throw Error("captioner.decode: prefix must start with BOS");
  }
  if (prefix.size() > config_.max_len) {
    throw Error("captioner.decode: prefix of " + std::to_string(prefix.size()) +
                " tokens exceeds the maximum of " + std::to_string(config_.max_len));
  }
  for (int id : prefix) {
    if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) {
      throw Error("captioner.decode: token id " + std::to_string(id) + " out of range");
    }
  }
  const std::size_t n = prefix.size();
  std::vector<int> positions(n);
  for (std::size_t i = 0; i < n; ++i) positions[i] = static_cast<int>(i);
  Var x = ad::add(ad::embedding(g.param(token_embedding_), prefix),
                  ad::embedding(g.param(position_embedding_), positions));
  const Tensor mask = nn::causal_mask(n);
  for (std::size_t i = 0; i < decoder_.size(); ++i) {
    if (!encoder_side()) x = integrate(g, x, encoded.suggestions, i);
    x = decoder_[i](g, x, encoded.memory, &mask);
  }
  x = decoder_norm_(g, x);
  return ad::matmul_nt(x, g.param(token_embedding_));
}

Var CaptionerModel::forward(ad::Graph& g, const Tensor& grid, std::span<const int> prefix,
                            const SuggestionUnits* units) const {
  return decode(g, encode(g, grid, units), prefix);
}

Var xe_loss(Var logits, std::span<const int> targets) {
  if (targets.size() != logits.rows()) throw Error("xe_loss: one target per row required");
  std::vector<double> weights(targets.size(), 1.0);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= logits.cols()) {
      throw Error("xe_loss: target id " + std::to_string(targets[i]) + " outside the vocabulary");
    }
    if (targets[i] == Vocabulary::kPad) weights[i] = 0.0;
  }
  return ad::cross_entropy(logits, targets, weights);
}

}  // namespace sst::caption
