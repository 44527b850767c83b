#include "sst/suggest/losses.hpp"

#include <cmath>

#include "sst/autodiff/ops.hpp"
#include "sst/error.hpp"
#include "sst/world/vocabulary.hpp"

namespace sst::suggest {

using ad::Var;
using world::Vocabulary;

namespace {

int draw_step(const SuggesterModel& model, Rng& rng) {
  const int steps = model.config().diffusion_steps;
  if (model.config().framework == Framework::direct) return steps;
  return rng.range(1, steps);
}

struct Denoised {
  Var logits;
  std::vector<int> masked_positions;
};

Denoised corrupt_and_denoise(ad::Graph& g, const SuggesterModel& model, Var encoded,
                             std::span<const int> x0, int t, Rng& rng) {
  const auto& cfg = model.config();
  const Schedule schedule(cfg.diffusion_steps);
  if (!is_discrete(cfg.framework)) {
    const auto padded = pad_to_positions(x0, model.analog_positions());
    NoisyState state = forward_corrupt(padded, t, schedule, cfg.framework, Vocabulary::kMask,
                                       cfg.vocab_size, rng);
    return {model.denoise(g, encoded, state), {}};
  }
  for (int attempt = 0;; ++attempt) {
    NoisyState state = forward_corrupt(x0, t, schedule, cfg.framework, Vocabulary::kMask,
                                       cfg.vocab_size, rng);
    std::vector<int> masked;
    for (std::size_t i = 0; i < state.tokens.size(); ++i) {
      if (state.tokens[i] == Vocabulary::kMask) masked.push_back(static_cast<int>(i));
    }
    if (!masked.empty()) return {model.denoise(g, encoded, state), std::move(masked)};
    if (attempt > 1000) throw Error("elbo_loss: could not draw a corrupted state");
    t = rng.range(1, cfg.diffusion_steps);
  }
}

Var masked_cross_entropy(const Denoised& d, std::span<const int> x0) {
  std::vector<int> targets;
  for (int p : d.masked_positions) targets.push_back(x0[static_cast<std::size_t>(p)]);
  Var rows = ad::gather_rows(d.logits, d.masked_positions);
  return ad::scale(ad::cross_entropy(rows, targets), 1.0 / static_cast<double>(targets.size()));
}

Var bit_loss(const SuggesterModel& model, Var logits, std::span<const int> x0) {
  const auto padded = pad_to_positions(x0, model.analog_positions());
  Tensor targets = encode_bits(padded, model.bit_width());
  for (double& v : targets.values()) v = v > 0.0 ? 1.0 : 0.0;
  return ad::bce_with_logits(logits, targets);
}

}  // namespace

std::vector<int> pad_to_positions(std::span<const int> x0, std::size_t positions) {
  if (x0.size() > positions) throw Error("suggestion set longer than the position budget");
  std::vector<int> out(x0.begin(), x0.end());
  out.resize(positions, Vocabulary::kPad);
  return out;
}

Var elbo_loss(ad::Graph& g, const SuggesterModel& model, Var encoded, std::span<const int> x0,
              int t, Rng& rng) {
  if (x0.empty()) throw Error("elbo_loss: empty target set");
  const Denoised d = corrupt_and_denoise(g, model, encoded, x0, t, rng);
  if (!is_discrete(model.config().framework)) return bit_loss(model, d.logits, x0);
  return masked_cross_entropy(d, x0);
}

Var length_loss(ad::Graph& g, const SuggesterModel& model, Var encoded,
                std::size_t target_length) {
  const std::size_t m = model.config().max_units;
  if (target_length < 1 || target_length > m) {
    throw Error("length_loss: target length " + std::to_string(target_length) +
                " outside [1, " + std::to_string(m) + "]");
  }
  const int cls[] = {static_cast<int>(target_length) - 1};
  return ad::cross_entropy(model.length_logits(g, encoded), cls);
}

Var a1h_loss(Var log_probs, std::span<const int> targets) {
  if (targets.empty()) throw Error("a1h_loss: empty target set");
  Var ce = ad::scale(ad::gather_cols(log_probs, targets), -1.0);
  return ad::mean(ad::row_min(ce));
}

double a1h_loss(const Tensor& probabilities, std::span<const int> targets) {
  ad::Graph g(nullptr, 0, false);
  Tensor logs = probabilities;
  for (double& v : logs.values()) {
    if (v < 0.0) throw Error("a1h_loss: negative probability");
    v = std::log(v);
  }
  // log(0) is clamped so the graph (which rejects non-finite values) accepts it.
  for (double& v : logs.values()) {
    if (!std::isfinite(v)) v = -1e300;
  }
  return a1h_loss(g.constant(std::move(logs)), targets).value().item();
}

Var length_penalty(ad::Graph& g, Var bit_logits, std::size_t target_length) {
  const std::size_t positions = bit_logits.rows();
  const std::size_t width = bit_logits.cols();
  // log P(position decodes to PAD) = sum_b log sigmoid(pad_bit_b * logit_b)
  Tensor pad_signs = encode_bits(std::vector<int>(positions, Vocabulary::kPad), width);
  Var log_pad = ad::sum_cols(ad::log_sigmoid(ad::mul(bit_logits, g.constant(pad_signs))));
  const double inv = 1.0 / static_cast<double>(positions);
  Var expected_fraction = ad::add_constant(ad::scale(ad::sum(ad::exp(log_pad)), -inv), Tensor::scalar(1.0));
  return ad::mse(expected_fraction, Tensor::scalar(static_cast<double>(target_length) * inv));
}

LossTerms suggester_loss(ad::Graph& g, const SuggesterModel& model, const Tensor& grid,
                         std::span<const int> x0, const LossOptions& options, Rng& rng) {
  if (x0.empty()) throw Error("suggester_loss: empty target set");
  const auto& cfg = model.config();
  Var encoded = model.encode(g, grid);
  const int t = draw_step(model, rng);
  LossTerms terms;
  Var elbo;
  Var extra;
  if (is_discrete(cfg.framework)) {
    const Denoised d = corrupt_and_denoise(g, model, encoded, x0, t, rng);
    elbo = masked_cross_entropy(d, x0);
    if (options.a1h) {
      Var a1h = a1h_loss(ad::log_softmax_rows(ad::gather_rows(d.logits, d.masked_positions)), x0);
      terms.a1h = a1h.value().item();
      extra = a1h;
    }
  } else {
    const Denoised d = corrupt_and_denoise(g, model, encoded, x0, t, rng);
    elbo = bit_loss(model, d.logits, x0);
    if (cfg.length_penalty) {
      Var lp = length_penalty(g, d.logits, x0.size());
      terms.penalty = lp.value().item();
      extra = lp;
    }
  }
  Var ll = length_loss(g, model, encoded, x0.size());
  terms.elbo = elbo.value().item();
  terms.length = ll.value().item();
  terms.total = ad::add(elbo, ll);
  if (extra.valid()) terms.total = ad::add(terms.total, extra);
  return terms;
}

}  // namespace sst::suggest
