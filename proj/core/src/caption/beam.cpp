#include "sst/caption/beam.hpp"

#include <algorithm>
#include <cmath>

#include "sst/autodiff/ops.hpp"
#include "sst/error.hpp"
#include "sst/world/vocabulary.hpp"

namespace sst::caption {

using world::Vocabulary;

double Hypothesis::score() const {
  return tokens.empty() ? 0.0 : log_prob / static_cast<double>(tokens.size());
}

namespace {

bool better(const Hypothesis& a, const Hypothesis& b) {
  const double sa = a.score(), sb = b.score();
  if (sa != sb) return sa > sb;
  return a.tokens < b.tokens;
}

bool allowed(const BeamOptions& o, int token) {
  return std::find(o.banned.begin(), o.banned.end(), token) == o.banned.end();
}

std::vector<int> with_bos(const BeamOptions& o, const std::vector<int>& tokens) {
  std::vector<int> prefix;
  prefix.reserve(tokens.size() + 1);
  prefix.push_back(o.bos);
  prefix.insert(prefix.end(), tokens.begin(), tokens.end());
  return prefix;
}

}  // namespace

Hypothesis beam_search(const NextTokenScorer& scorer, const BeamOptions& options) {
  if (options.beam < 1) throw Error("beam_search: beam size must be >= 1");
  if (options.max_len < 1) throw Error("beam_search: max_len must be >= 1");
  std::vector<Hypothesis> running{Hypothesis{}};
  std::vector<Hypothesis> completed;
  for (std::size_t step = 0; step < options.max_len && !running.empty(); ++step) {
    std::vector<Hypothesis> candidates;
    for (const auto& hyp : running) {
      const auto prefix = with_bos(options, hyp.tokens);
      const auto logp = scorer(prefix);
      for (std::size_t tok = 0; tok < logp.size(); ++tok) {
        const int id = static_cast<int>(tok);
        if (!allowed(options, id)) continue;
        Hypothesis next = hyp;
        next.tokens.push_back(id);
        next.log_prob += logp[tok];
        next.finished = id == options.eos;
        candidates.push_back(std::move(next));
      }
    }
    std::sort(candidates.begin(), candidates.end(), better);
    if (candidates.size() > options.beam) candidates.resize(options.beam);
    running.clear();
    for (auto& c : candidates) {
      if (c.finished) {
        completed.push_back(std::move(c));
      } else {
        running.push_back(std::move(c));
      }
    }
  }
  const auto& pool = completed.empty() ? running : completed;
  if (pool.empty()) throw Error("beam_search: no hypotheses (every token banned?)");
  return *std::min_element(pool.begin(), pool.end(), better);
}

Hypothesis greedy_decode(const NextTokenScorer& scorer, const BeamOptions& options) {
  Hypothesis hyp;
  for (std::size_t step = 0; step < options.max_len; ++step) {
    const auto logp = scorer(with_bos(options, hyp.tokens));
    int best = -1;
    for (std::size_t tok = 0; tok < logp.size(); ++tok) {
      if (!allowed(options, static_cast<int>(tok))) continue;
      if (best < 0 || logp[tok] > logp[static_cast<std::size_t>(best)]) best = static_cast<int>(tok);
    }
    if (best < 0) throw Error("greedy_decode: every token is banned");
    hyp.tokens.push_back(best);
    hyp.log_prob += logp[static_cast<std::size_t>(best)];
    if (best == options.eos) {
      hyp.finished = true;
      break;
    }
  }
  return hyp;
}

CaptionerScorer::CaptionerScorer(const CaptionerModel& model, const Tensor& grid,
                                 const SuggestionUnits* units)
    : model_(&model) {
  ad::Graph g(const_cast<ad::ParameterStore*>(&model.parameters()), 0, false);
  const Encoded enc = model.encode(g, grid, units);
  memory_ = enc.memory.value();
  if (enc.suggestions.valid()) suggestions_ = enc.suggestions.value();
}

std::vector<double> CaptionerScorer::operator()(std::span<const int> prefix) const {
  ad::Graph g(const_cast<ad::ParameterStore*>(&model_->parameters()), 0, false);
  Encoded enc;
  enc.memory = g.constant(memory_, "memory");
  if (!suggestions_.empty()) enc.suggestions = g.constant(suggestions_, "suggestions");
  const ad::Var logits = model_->decode(g, enc, prefix);
  const ad::Var last = ad::slice_rows(logits, logits.rows() - 1, 1);
  const auto v = ad::log_softmax_rows(last).value().values();
  return {v.begin(), v.end()};
}

BeamOptions captioner_beam_options(const CaptionerModel& model, std::size_t beam) {
  BeamOptions o;
  o.beam = beam;
  o.max_len = model.config().max_len;
  o.bos = Vocabulary::kBos;
  o.eos = Vocabulary::kEos;
  o.banned = {Vocabulary::kPad, Vocabulary::kBos, Vocabulary::kMask, Vocabulary::kUnk};
  return o;
}

Hypothesis caption_scene(const CaptionerModel& model, const Tensor& grid,
                         const SuggestionUnits* units, std::size_t beam) {
  const CaptionerScorer scorer(model, grid, units);
  Hypothesis h = beam_search(scorer, captioner_beam_options(model, beam));
  if (h.finished && !h.tokens.empty()) h.tokens.pop_back();
  return h;
}

}  // namespace sst::caption
