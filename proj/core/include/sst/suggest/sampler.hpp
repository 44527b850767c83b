#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sst/autodiff/tensor.hpp"
#include "sst/suggest/diffusion.hpp"
#include "sst/suggest/model.hpp"

namespace sst::suggest {

// Sampled suggestion units: duplicate-free, ascending ids.
struct SuggestionOutput {
  std::vector<int> units;
  // Sequence length the sampler decoded before deduplication.
  std::size_t decoded_length = 0;

  std::size_t size() const { return units.size(); }
};

// Returns logits for a state: [length x vocab] for discrete frameworks or
// [length x bits] for analog-bit. `state.t` is on the model's step scale.
using Denoiser = std::function<Tensor(const NoisyState& state)>;

struct SamplerOptions {
  Framework framework = Framework::reparametrized;
  int steps = 20;             // sampling passes (direct always uses 1)
  int diffusion_steps = 20;   // model's training T
  std::size_t length = 1;     // decoded positions
  std::size_t vocab_size = 0;
  // Analog-bit: keep at most this many units by decoding confidence (0 = all).
  std::size_t cap = 0;
  // Discrete frameworks: a position may not take a token already committed
  // elsewhere, so every committed position adds a unit to the set.
  bool distinct = true;
};

// Model step used at sampling pass t of `steps` (ceil(t * T / steps)).
int model_step(int pass, int steps, int diffusion_steps);
// Positions committed after pass t: ceil(S * (1 - (t - 1) / steps)).
std::size_t commit_target(std::size_t length, int pass, int steps);

// Iterative decoding from an all-MASK (or pure-noise) start.
//  - direct: one pass, argmax everywhere.
//  - absorbing: masked positions are committed by confidence; commitments are
//    final.
//  - reparametrized: every pass rescores all positions; only the top
//    commit_target positions keep their token, the rest return to MASK.
//  - analog-bit: deterministic (DDIM-style) denoising of codewords, decoded to
//    the nearest valid codeword; PAD positions are dropped.
// Confidence ties go to the lower position. Special ids are never emitted.
SuggestionOutput run_sampler(const Denoiser& denoiser, const SamplerOptions& options, Rng& rng);

// Samples suggestions for one grid. The decoded length comes from the length
// head (analog-bit decodes all positions and uses the head only as a cap
// when the model has the length penalty).
SuggestionOutput sample_suggestions(const SuggesterModel& model, const Tensor& grid, int steps,
                                    Framework framework, Rng& rng);

}  // namespace sst::suggest
