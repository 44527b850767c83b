#include "sst/suggest/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sst/error.hpp"

namespace sst::suggest {

namespace {

std::span<const world::Example> capped(std::span<const world::Example> all, std::size_t cap) {
  return cap == 0 || cap >= all.size() ? all : all.first(cap);
}

}  // namespace

world::TokenSet scoring_reference(const world::Example& example, const world::Vocabulary& vocab,
                                  bool content_only) {
  world::TokenSetOptions o;
  o.refs_per_image = 5;
  o.content_only = content_only;
  return world::unique_token_set(example.refs, vocab, o);
}

std::vector<SuggestionOutput> predict_suggestions(const SuggesterModel& model,
                                                  std::span<const world::Example> examples,
                                                  int steps, std::uint64_t seed) {
  std::vector<SuggestionOutput> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    Rng rng(derive_seed(seed, ex.index));
    out.push_back(sample_suggestions(model, ex.grid, steps, model.config().framework, rng));
  }
  return out;
}

metrics::SuggestionScore evaluate_suggester(const SuggesterModel& model,
                                            std::span<const world::Example> examples,
                                            const world::Vocabulary& vocab, int steps,
                                            bool content_only, std::uint64_t seed) {
  const auto predicted = predict_suggestions(model, examples, steps, seed);
  metrics::SuggestionScorer scorer(content_only);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto suggested = world::TokenSet::from_units(predicted[i].units, vocab);
    scorer.add(suggested, scoring_reference(examples[i], vocab, content_only));
  }
  return scorer.score();
}

SuggesterTrainResult train_suggester(const SuggesterConfig& config, const world::Dataset& data,
                                     const world::Vocabulary& vocab,
                                     const SuggesterTrainOptions& options) {
  if (config.vocab_size != vocab.size()) throw Error("train_suggester: vocabulary size mismatch");
  if (options.batch_size == 0) throw Error("train_suggester: batch size must be positive");
  const auto train = capped(data.split(world::Split::train), options.max_train);
  const auto val = capped(data.split(world::Split::val), options.max_val);
  if (train.empty()) throw Error("train_suggester: empty training split");

  world::TokenSetOptions target_options = options.targets;
  target_options.max_units = config.max_units;
  std::vector<std::vector<int>> targets;
  targets.reserve(train.size());
  for (const auto& ex : train) {
    targets.push_back(world::unique_token_set(ex.refs, vocab, target_options).units);
  }

  SuggesterTrainResult result{SuggesterModel(config, derive_seed(options.seed, 0x5u)), {}};
  SuggesterModel& model = result.model;
  ad::ParameterStore& store = model.parameters();

  const std::size_t batches = (train.size() + options.batch_size - 1) / options.batch_size;
  ad::AdamConfig adam_config = options.adam;
  if (adam_config.total_steps == 0) adam_config.total_steps = batches * options.epochs;
  ad::Adam adam(store, adam_config);
  ad::Gradients grads(store);
  ad::Gradients batch_grads(store);
  LossOptions loss_options;
  loss_options.a1h = options.a1h;

  std::vector<std::size_t> order(train.size());
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng order_rng(derive_seed(options.seed, 0x0D, epoch));
    order_rng.shuffle(order);

    SuggesterEpochLog entry;
    entry.epoch = epoch + 1;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t begin = b * options.batch_size;
      const std::size_t end = std::min(begin + options.batch_size, order.size());
      batch_grads.clear();
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t idx = order[k];
        Rng rng(derive_seed(options.seed, 0x1055, epoch, train[idx].index));
        std::vector<int> x0 = targets[idx];
        if (options.shuffle_set_order) rng.shuffle(x0);
        LossTerms terms;
        ad::Graph g(&store, rng.next_u64());
        try {
          terms = suggester_loss(g, model, train[idx].grid, x0, loss_options, rng);
          g.backward(ad::scale(terms.total, 1.0 / static_cast<double>(end - begin)));
        } catch (const Error& e) {
          throw Error("train_suggester: diverged at epoch " + std::to_string(epoch + 1) +
                      ", step " + std::to_string(adam.steps_taken() + 1) + ": " + e.what());
        }
        grads.clear();
        g.collect_gradients(grads);
        batch_grads.add(grads);
        entry.loss += terms.total.value().item();
        entry.elbo += terms.elbo;
        entry.length += terms.length;
      }
      adam.step(store, batch_grads);
    }
    const double n = static_cast<double>(train.size());
    entry.loss /= n;
    entry.elbo /= n;
    entry.length /= n;
    const bool last = epoch + 1 == options.epochs;
    const bool due = options.eval_every > 0 && (epoch + 1) % options.eval_every == 0;
    if (options.eval_steps > 0 && !val.empty() && (last || due)) {
      std::size_t hits = 0;
      for (const auto& ex : val) {
        const auto k = world::unique_token_set(ex.refs, vocab, target_options);
        if (model.predict_length(ex.grid) == k.size()) ++hits;
      }
      entry.length_accuracy = static_cast<double>(hits) / static_cast<double>(val.size());
      entry.val = evaluate_suggester(model, val, vocab, options.eval_steps,
                                     options.targets.content_only,
                                     derive_seed(options.seed, 0xE7A1, epoch));
    }
    result.log.push_back(entry);
  }
  return result;
}

}  // namespace sst::suggest
