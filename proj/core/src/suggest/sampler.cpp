#include "sst/suggest/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sst/autodiff/ops.hpp"
#include "sst/error.hpp"
#include "sst/world/vocabulary.hpp"

namespace sst::suggest {

using world::Vocabulary;

namespace {

struct Candidate {
  int token = Vocabulary::kUnk;
  double confidence = 0.0;
};

// Best regular token and its softmax probability, per row.
std::vector<Candidate> best_tokens(const Tensor& logits) {
  std::vector<Candidate> out(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < logits.cols(); ++c) mx = std::max(mx, logits(r, c));
    double z = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) z += std::exp(logits(r, c) - mx);
    int best = -1;
    for (std::size_t c = Vocabulary::kNumSpecial; c < logits.cols(); ++c) {
      if (best < 0 || logits(r, c) > logits(r, static_cast<std::size_t>(best))) best = static_cast<int>(c);
    }
    if (best < 0) throw Error("sampler: vocabulary has no regular units");
    out[r] = {best, std::exp(logits(r, static_cast<std::size_t>(best)) - mx) / z};
  }
  return out;
}

// Positions ordered by descending confidence, ties to the lower index.
std::vector<std::size_t> by_confidence(const std::vector<Candidate>& cands,
                                       const std::vector<std::size_t>& positions) {
  std::vector<std::size_t> order = positions;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cands[a].confidence > cands[b].confidence;
  });
  return order;
}

SuggestionOutput finish(std::vector<int> units, std::size_t decoded) {
  std::sort(units.begin(), units.end());
  units.erase(std::unique(units.begin(), units.end()), units.end());
  return {std::move(units), decoded};
}

// Softmax probabilities of a logit row.
std::vector<double> row_probs(const Tensor& logits, std::size_t r) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < logits.cols(); ++c) mx = std::max(mx, logits(r, c));
  std::vector<double> p(logits.cols());
  double z = 0.0;
  for (std::size_t c = 0; c < logits.cols(); ++c) z += p[c] = std::exp(logits(r, c) - mx);
  for (double& v : p) v /= z;
  return p;
}

// Commits up to `count` of the `open` positions, most confident first. With
// `distinct`, a position may only take a token not already in `taken`; its
// confidence is then that of its best remaining token.
void commit(const Tensor& logits, const std::vector<std::size_t>& open, std::size_t count,
            bool distinct, std::vector<int>& tokens, std::vector<bool>& committed) {
  if (!distinct) {
    const auto cands = best_tokens(logits);
    const auto order = by_confidence(cands, open);
    for (std::size_t k = 0; k < count && k < order.size(); ++k) {
      tokens[order[k]] = cands[order[k]].token;
      committed[order[k]] = true;
    }
    return;
  }
  std::vector<bool> taken(logits.cols(), false);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (committed[i]) taken[static_cast<std::size_t>(tokens[i])] = true;
  }
  std::vector<std::vector<double>> probs;
  for (std::size_t r : open) probs.push_back(row_probs(logits, r));
  std::vector<bool> used(open.size(), false);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t best_row = open.size();
    std::size_t best_col = 0;
    double best_p = -1.0;
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (used[i]) continue;
      for (std::size_t c = Vocabulary::kNumSpecial; c < logits.cols(); ++c) {
        if (!taken[c] && probs[i][c] > best_p) {
          best_p = probs[i][c];
          best_row = i;
          best_col = c;
        }
      }
    }
    if (best_row == open.size()) break;
    used[best_row] = true;
    taken[best_col] = true;
    tokens[open[best_row]] = static_cast<int>(best_col);
    committed[open[best_row]] = true;
  }
}

SuggestionOutput sample_discrete(const Denoiser& denoiser, const SamplerOptions& o) {
  const std::size_t len = o.length;
  const int steps = o.framework == Framework::direct ? 1 : o.steps;
  std::vector<int> tokens(len, Vocabulary::kMask);
  std::vector<bool> committed(len, false);
  for (int pass = steps; pass >= 1; --pass) {
    NoisyState state;
    state.tokens = tokens;
    state.t = model_step(pass, steps, o.diffusion_steps);
    const Tensor logits = denoiser(state);
    if (logits.rows() != len || logits.cols() != o.vocab_size) {
      throw Error("sampler: denoiser returned logits of the wrong shape");
    }
    const std::size_t target = commit_target(len, pass, steps);
    std::vector<std::size_t> open;
    if (o.framework == Framework::reparametrized) {
      std::fill(tokens.begin(), tokens.end(), Vocabulary::kMask);
      std::fill(committed.begin(), committed.end(), false);
    }
    std::size_t done = 0;
    for (std::size_t i = 0; i < len; ++i) {
      if (committed[i]) {
        ++done;
      } else {
        open.push_back(i);
      }
    }
    if (target > done) commit(logits, open, target - done, o.distinct, tokens, committed);
  }
  std::vector<int> units;
  for (std::size_t i = 0; i < len; ++i) {
    if (committed[i]) units.push_back(tokens[i]);
  }
  return finish(std::move(units), len);
}

SuggestionOutput sample_analog(const Denoiser& denoiser, const SamplerOptions& o, Rng& rng) {
  const std::size_t len = o.length;
  const std::size_t width = codeword_width(o.vocab_size);
  const Schedule schedule(o.diffusion_steps);
  Tensor x = Tensor::matrix(len, width);
  for (double& v : x.values()) v = rng.normal();
  Tensor estimate;
  for (int pass = o.steps; pass >= 1; --pass) {
    NoisyState state;
    state.bits = x;
    state.t = model_step(pass, o.steps, o.diffusion_steps);
    const Tensor logits = denoiser(state);
    if (logits.rows() != len || logits.cols() != width) {
      throw Error("sampler: analog denoiser returned logits of the wrong shape");
    }
    estimate = logits;
    for (double& v : estimate.values()) v = std::tanh(0.5 * v);
    if (pass == 1) break;
    const double a_t = schedule.alpha(state.t);
    const double a_prev = schedule.alpha(model_step(pass - 1, o.steps, o.diffusion_steps));
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double eps = (x[i] - std::sqrt(a_t) * estimate[i]) / std::sqrt(1.0 - a_t);
      x[i] = std::sqrt(a_prev) * estimate[i] + std::sqrt(1.0 - a_prev) * eps;
    }
  }
  // Nearest valid codeword by correlation; PAD marks an empty position.
  std::vector<int> valid{Vocabulary::kPad};
  for (int id = Vocabulary::kNumSpecial; id < static_cast<int>(o.vocab_size); ++id) valid.push_back(id);
  std::vector<Candidate> decoded(len);
  for (std::size_t r = 0; r < len; ++r) {
    Candidate best{Vocabulary::kPad, -std::numeric_limits<double>::infinity()};
    for (int id : valid) {
      const auto code = codeword(id, width);
      double corr = 0.0;
      for (std::size_t b = 0; b < width; ++b) corr += code[b] * estimate(r, b);
      if (corr > best.confidence) best = {id, corr};
    }
    decoded[r] = best;
  }
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < len; ++r) {
    if (decoded[r].token != Vocabulary::kPad) kept.push_back(r);
  }
  auto order = by_confidence(decoded, kept);
  std::vector<int> units;
  for (std::size_t r : order) {
    if (std::find(units.begin(), units.end(), decoded[r].token) != units.end()) continue;
    if (o.cap > 0 && units.size() >= o.cap) break;
    units.push_back(decoded[r].token);
  }
  return finish(std::move(units), len);
}

}  // namespace

int model_step(int pass, int steps, int diffusion_steps) {
  return (pass * diffusion_steps + steps - 1) / steps;
}

std::size_t commit_target(std::size_t length, int pass, int steps) {
  const auto remaining = static_cast<std::size_t>(steps - pass + 1);
  const auto s = static_cast<std::size_t>(steps);
  return (length * remaining + s - 1) / s;
}

SuggestionOutput run_sampler(const Denoiser& denoiser, const SamplerOptions& options, Rng& rng) {
  if (options.steps < 1) throw Error("sampler: steps must be >= 1");
  if (options.steps > options.diffusion_steps) {
    throw Error("sampler: steps exceed the model's diffusion steps");
  }
  if (options.length < 1) throw Error("sampler: length must be >= 1");
  if (is_discrete(options.framework)) return sample_discrete(denoiser, options);
  return sample_analog(denoiser, options, rng);
}

SuggestionOutput sample_suggestions(const SuggesterModel& model, const Tensor& grid, int steps,
                                    Framework framework, Rng& rng) {
  const auto& cfg = model.config();
  if (is_discrete(framework) != is_discrete(cfg.framework)) {
    throw Error("sample_suggestions: framework does not match the trained model");
  }
  ad::Graph g(const_cast<ad::ParameterStore*>(&model.parameters()), 0, false);
  const ad::Var encoded = model.encode(g, grid);
  const Tensor len_logits = model.length_logits(g, encoded).value();
  const auto lv = len_logits.values();
  const std::size_t predicted =
      static_cast<std::size_t>(std::max_element(lv.begin(), lv.end()) - lv.begin()) + 1;

  SamplerOptions o;
  o.framework = framework;
  o.steps = steps;
  o.diffusion_steps = cfg.diffusion_steps;
  o.vocab_size = cfg.vocab_size;
  if (is_discrete(framework)) {
    o.length = predicted;
  } else {
    o.length = model.analog_positions();
    o.cap = cfg.length_penalty ? predicted : 0;
  }
  const Denoiser denoiser = [&](const NoisyState& state) {
    return model.denoise(g, encoded, state).value();
  };
  return run_sampler(denoiser, o, rng);
}

}  // namespace sst::suggest
