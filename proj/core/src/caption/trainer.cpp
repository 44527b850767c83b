#include "sst/caption/trainer.hpp"

#include <algorithm>
#include <string>

#include "sst/error.hpp"

namespace sst::caption {

using world::Vocabulary;

namespace {

std::span<const world::Example> capped(std::span<const world::Example> all, std::size_t cap) {
  return cap == 0 || cap >= all.size() ? all : all.first(cap);
}

std::size_t argmax_hits(const Tensor& logits, std::span<const int> targets) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.cols(); ++c) {
      if (logits(r, c) > logits(r, best)) best = c;
    }
    if (static_cast<int>(best) == targets[r]) ++hits;
  }
  return hits;
}

}  // namespace

std::vector<int> caption_input(const world::Caption& caption, const Vocabulary& vocab) {
  std::vector<int> ids{Vocabulary::kBos};
  const auto words = vocab.encode(caption);
  ids.insert(ids.end(), words.begin(), words.end());
  return ids;
}

std::vector<int> caption_target(const world::Caption& caption, const Vocabulary& vocab) {
  std::vector<int> ids = vocab.encode(caption);
  ids.push_back(Vocabulary::kEos);
  return ids;
}

SuggestionUnits provider_units(const SuggestionProvider* provider, const world::Example& example,
                               const Vocabulary& vocab, std::uint64_t draw) {
  if (provider == nullptr) return {};
  return to_captioner_units(provider->suggest(example, draw), provider->vocabulary(), vocab);
}

double teacher_forced_xe(const CaptionerModel& model, std::span<const world::Example> examples,
                         const SuggestionProvider* provider, const Vocabulary& vocab) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& ex : examples) {
    const auto units = provider_units(provider, ex, vocab, kInferenceDraw);
    ad::Graph g(const_cast<ad::ParameterStore*>(&model.parameters()), 0, false);
    const Encoded enc = model.encode(g, ex.grid, &units);
    for (const auto& caption : ex.refs.captions) {
      const auto logits = model.decode(g, enc, caption_input(caption, vocab));
      total += xe_loss(logits, caption_target(caption, vocab)).value().item();
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

CaptionEval evaluate_captioner(const CaptionerModel& model, std::span<const world::Example> examples,
                               const SuggestionProvider* provider, const Vocabulary& vocab,
                               std::size_t beam) {
  CaptionEval out;
  std::vector<metrics::RefList> refs;
  for (const auto& ex : examples) {
    const auto units = provider_units(provider, ex, vocab, kInferenceDraw);
    const Hypothesis h = caption_scene(model, ex.grid, &units, beam);
    out.captions.push_back(vocab.decode(h.tokens));
    out.log_probs.push_back(h.log_prob);
    out.suggestions_used.push_back(units.size());
    refs.emplace_back(ex.refs.captions.begin(), ex.refs.captions.end());
  }
  if (!examples.empty()) out.scores = metrics::caption_scores(out.captions, refs);
  out.xe = teacher_forced_xe(model, examples, provider, vocab);
  return out;
}

CaptionerTrainResult train_captioner(const CaptionerConfig& config, const world::Dataset& data,
                                     const Vocabulary& vocab, const SuggestionProvider* provider,
                                     const CaptionerTrainOptions& options) {
  if (config.vocab_size != vocab.size()) throw Error("train_captioner: vocabulary size mismatch");
  if (options.batch_size == 0) throw Error("train_captioner: batch size must be positive");
  if (!(options.suggestion_dropout >= 0.0 && options.suggestion_dropout <= 1.0)) {
    throw Error("train_captioner: suggestion dropout must lie in [0, 1]");
  }
  const auto train = capped(data.split(world::Split::train), options.max_train);
  const auto val = capped(data.split(world::Split::val), options.max_val);
  if (train.empty()) throw Error("train_captioner: empty training split");

  CaptionerTrainResult result{CaptionerModel(config, derive_seed(options.seed, 0xCA9u)), {}};
  CaptionerModel& model = result.model;
  ad::ParameterStore& store = model.parameters();
  const std::size_t batches = (train.size() + options.batch_size - 1) / options.batch_size;
  ad::AdamConfig adam_config = options.adam;
  if (adam_config.total_steps == 0) adam_config.total_steps = batches * options.epochs;
  ad::Adam adam(store, adam_config);
  ad::Gradients grads(store);
  ad::Gradients batch_grads(store);

  std::vector<std::size_t> order(train.size());
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng order_rng(derive_seed(options.seed, 0x0D, epoch));
    order_rng.shuffle(order);

    CaptionerEpochLog entry;
    entry.epoch = epoch + 1;
    std::size_t dropped = 0, hits = 0, tokens = 0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t begin = b * options.batch_size;
      const std::size_t end = std::min(begin + options.batch_size, order.size());
      batch_grads.clear();
      for (std::size_t k = begin; k < end; ++k) {
        const world::Example& ex = train[order[k]];
        Rng rng(derive_seed(options.seed, 0xD50, epoch, ex.index));
        const bool drop = rng.bernoulli(options.suggestion_dropout);
        if (drop) ++dropped;
        SuggestionUnits units;
        if (!drop) units = provider_units(provider, ex, vocab, epoch);
        const auto& caption = ex.refs.captions[(epoch + ex.index) % ex.refs.captions.size()];
        const auto input = caption_input(caption, vocab);
        const auto target = caption_target(caption, vocab);

        ad::Graph g(&store, rng.next_u64());
        ad::Var loss;
        try {
          const ad::Var logits = model.forward(g, ex.grid, input, drop ? nullptr : &units);
          hits += argmax_hits(logits.value(), target);
          tokens += target.size();
          loss = xe_loss(logits, target);
          g.backward(ad::scale(loss, 1.0 / static_cast<double>(end - begin)));
        } catch (const Error& e) {
          throw Error("train_captioner: diverged at epoch " + std::to_string(epoch + 1) +
                      ", step " + std::to_string(adam.steps_taken() + 1) + ": " + e.what());
        }
        grads.clear();
        g.collect_gradients(grads);
        batch_grads.add(grads);
        entry.loss += loss.value().item();
      }
      adam.step(store, batch_grads);
    }
    entry.loss /= static_cast<double>(train.size());
    entry.token_accuracy = static_cast<double>(hits) / static_cast<double>(tokens);
    entry.dropped_fraction = static_cast<double>(dropped) / static_cast<double>(train.size());
    if (options.evaluate && !val.empty()) {
      const bool last = epoch + 1 == options.epochs;
      const bool due = options.eval_every > 0 && (epoch + 1) % options.eval_every == 0;
      if (last || due) {
        const CaptionEval ev = evaluate_captioner(model, val, provider, vocab, options.beam);
        entry.val_loss = ev.xe;
        entry.val = ev.scores;
        entry.has_scores = true;
      } else {
        entry.val_loss = teacher_forced_xe(model, val, provider, vocab);
      }
    }
    result.log.push_back(entry);
  }
  return result;
}

}  // namespace sst::caption
