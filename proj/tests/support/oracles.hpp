#pragma once

// Exact oracles and model probes shared by the unit tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "sst/autodiff/ops.hpp"
#include "sst/caption/beam.hpp"
#include "sst/caption/model.hpp"
#include "sst/rng.hpp"
#include "sst/suggest/losses.hpp"
#include "sst/suggest/sampler.hpp"
#include "sst/world/scene.hpp"
#include "sst/world/vocabulary.hpp"

namespace sst::testing {

using caption::BeamOptions;
using caption::CaptionerConfig;
using caption::CaptionerModel;
using caption::Encoded;
using caption::Hypothesis;
using caption::Integration;
using caption::NextTokenScorer;
using caption::SuggestionUnits;
using suggest::Denoiser;
using suggest::Framework;
using suggest::NoisyState;

// Denoiser that always puts a large logit on the truth.
inline Denoiser perfect_denoiser(const std::vector<int>& x0, std::size_t vocab, Framework f,
                                 std::size_t positions) {
  return [=](const NoisyState& s) {
    if (suggest::is_discrete(f)) {
      Tensor logits = Tensor::matrix(s.length(), vocab);
      for (std::size_t i = 0; i < s.length(); ++i) logits(i, static_cast<std::size_t>(x0.at(i))) = 40.0;
      return logits;
    }
    const auto padded = suggest::pad_to_positions(x0, positions);
    Tensor logits = suggest::encode_bits(padded, suggest::codeword_width(vocab));
    for (double& v : logits.values()) v *= 40.0;
    return logits;
  };
}

inline CaptionerConfig toy_config(std::size_t vocab, Integration v, std::size_t hidden = 8) {
  CaptionerConfig c;
  c.vocab_size = vocab;
  c.hidden = hidden;
  c.layers = 2;
  c.heads = 2;
  c.ff_dim = 16;
  c.integration = v;
  return c;
}

inline Tensor logits_of(const CaptionerModel& m, const Tensor& grid, const std::vector<int>& prefix,
                        const SuggestionUnits* units) {
  ad::Graph g(const_cast<ad::ParameterStore*>(&m.parameters()), 0, false);
  return m.forward(g, grid, prefix, units).value();
}

inline Tensor logits_with_rows(const CaptionerModel& m, const Tensor& grid, const std::vector<int>& prefix,
                               const Tensor& p) {
  ad::Graph g(const_cast<ad::ParameterStore*>(&m.parameters()), 0, false);
  Encoded enc = m.encode(g, grid, nullptr);
  enc.suggestions = g.constant(p);
  return m.decode(g, enc, prefix).value();
}

inline Tensor reduce_of(const CaptionerModel& m, const Tensor& p, std::size_t layer) {
  ad::Graph g(const_cast<ad::ParameterStore*>(&m.parameters()), 0, false);
  return m.reduce(g, g.constant(p), layer).value();
}

// Random dyadic values keep every sum and product below exact.
inline Tensor dyadic(Rng& rng, std::size_t r, std::size_t c) {
  Tensor t = Tensor::matrix(r, c);
  for (double& v : t.values()) v = static_cast<double>(rng.range(-8, 8)) / 8.0;
  return t;
}

inline const Tensor& grid() {
  static const Tensor g = world::feature_grid(world::sample_scene(17));
  return g;
}

inline void perturb(CaptionerModel& m, std::string_view prefix, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = 0; i < m.parameters().size(); ++i) {
    if (m.parameters().name(i).rfind(prefix, 0) == 0) {
      for (double& v : m.parameters().value(i).values()) v += rng.uniform(-0.5, 0.5);
    }
  }
}

// Exhaustive argmax over every EOS-terminated sequence of at most max_len
// tokens, using the same normalisation and tie rule as the beam.
inline Hypothesis exhaustive(const NextTokenScorer& scorer, const BeamOptions& o, std::size_t vocab) {
  Hypothesis best;
  bool found = false;
  std::function<void(Hypothesis)> walk = [&](Hypothesis h) {
    if (h.tokens.size() == o.max_len) return;
    std::vector<int> prefix{o.bos};
    prefix.insert(prefix.end(), h.tokens.begin(), h.tokens.end());
    const auto logp = scorer(prefix);
    for (std::size_t t = 0; t < vocab; ++t) {
      Hypothesis next = h;
      next.tokens.push_back(int(t));
      next.log_prob += logp[t];
      if (int(t) == o.eos) {
        const bool better = !found || next.score() > best.score() ||
                            (next.score() == best.score() && next.tokens < best.tokens);
        if (better) best = next;
        found = true;
      } else {
        walk(next);
      }
    }
  };
  walk(Hypothesis{});
  return best;
}

// Random toy language model over 5 tokens whose next-token distribution
// depends on the whole prefix.
inline NextTokenScorer toy_checkpoint(std::uint64_t seed) {
  Rng rng(seed);
  auto e = std::make_shared<Tensor>(Tensor::matrix(5, 4));
  auto w = std::make_shared<Tensor>(Tensor::matrix(4, 5));
  for (double& v : e->values()) v = rng.uniform(-1, 1);
  for (double& v : w->values()) v = rng.uniform(-2, 2);
  return [e, w](std::span<const int> prefix) {
    std::vector<double> h(4, 0.0);
    for (std::size_t k = 0; k < prefix.size(); ++k) {
      for (std::size_t j = 0; j < 4; ++j) h[j] += (*e)(std::size_t(prefix[k]), j) * double(k + 1);
    }
    std::vector<double> logits(5, 0.0);
    double mx = -1e300;
    for (std::size_t c = 0; c < 5; ++c) {
      for (std::size_t j = 0; j < 4; ++j) logits[c] += std::tanh(h[j]) * (*w)(j, c);
      mx = std::max(mx, logits[c]);
    }
    double z = 0;
    for (double l : logits) z += std::exp(l - mx);
    for (double& l : logits) l = l - mx - std::log(z);
    return logits;
  };
}

}  // namespace sst::testing
