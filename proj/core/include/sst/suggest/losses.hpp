#pragma once

#include <cstddef>
#include <span>

#include "sst/autodiff/graph.hpp"
#include "sst/suggest/model.hpp"

namespace sst::suggest {

// Denoising surrogate of the ELBO with uniform step weights.
//
// Discrete frameworks: mean cross-entropy against x0 over the positions that
// are absorbed at step t. When nothing is absorbed a fresh t is drawn from
// {1..T}. Analog-bit: mean binary cross-entropy of the bit logits against the
// x0 codewords, with x0 padded by PAD to the model's fixed position count.
ad::Var elbo_loss(ad::Graph& g, const SuggesterModel& model, ad::Var encoded,
                  std::span<const int> x0, int t, Rng& rng);

// Cross-entropy of the length head against class |x0|.
ad::Var length_loss(ad::Graph& g, const SuggesterModel& model, ad::Var encoded,
                    std::size_t target_length);

// Set-average cross-entropy: mean over rows of min over targets of
// -log_probs[row, target]. `log_probs` holds log-distributions per row.
ad::Var a1h_loss(ad::Var log_probs, std::span<const int> targets);
// Convenience form over explicit probability rows.
double a1h_loss(const Tensor& probabilities, std::span<const int> targets);

// Analog-bit length penalty: squared difference between the expected number
// of non-PAD positions and |x0|, both divided by the position count.
ad::Var length_penalty(ad::Graph& g, ad::Var bit_logits, std::size_t target_length);

struct LossOptions {
  bool a1h = false;
};

struct LossTerms {
  ad::Var total;
  double elbo = 0.0;
  double length = 0.0;
  double a1h = 0.0;
  double penalty = 0.0;
};

// Full per-scene training objective: ELBO surrogate + length loss
// (+ A1H) (+ length penalty for analog-bit with length_penalty set). The
// diffusion step is drawn uniformly from {1..T}; direct prediction always
// uses t = T.
LossTerms suggester_loss(ad::Graph& g, const SuggesterModel& model, const Tensor& grid,
                         std::span<const int> x0, const LossOptions& options, Rng& rng);

// x0 padded with PAD up to the analog position count.
std::vector<int> pad_to_positions(std::span<const int> x0, std::size_t positions);

}  // namespace sst::suggest
