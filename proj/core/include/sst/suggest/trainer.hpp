#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sst/autodiff/optim.hpp"
#include "sst/metrics/suggestion_score.hpp"
#include "sst/suggest/losses.hpp"
#include "sst/suggest/model.hpp"
#include "sst/suggest/sampler.hpp"
#include "sst/world/dataset.hpp"
#include "sst/world/token_set.hpp"

namespace sst::suggest {

struct SuggesterTrainOptions {
  world::TokenSetOptions targets;  // refs per image, content-only
  bool a1h = false;
  // Present each target set in a fresh random order instead of ascending ids.
  bool shuffle_set_order = false;
  std::size_t epochs = 20;
  std::size_t batch_size = 16;
  ad::AdamConfig adam;  // total_steps 0 means epochs * batches
  std::uint64_t seed = 0;
  // Sampling passes used for validation scoring; 0 skips validation.
  int eval_steps = 20;
  // Validate every this many epochs; the last epoch is always validated.
  std::size_t eval_every = 1;
  // Caps the training scenes used (0 = the whole training split).
  std::size_t max_train = 0;
  std::size_t max_val = 0;
};

struct SuggesterEpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double elbo = 0.0;
  double length = 0.0;
  double length_accuracy = 0.0;  // argmax length head on validation
  metrics::SuggestionScore val;
};

struct SuggesterTrainResult {
  SuggesterModel model;
  std::vector<SuggesterEpochLog> log;
};

// Scoring reference for a scene: the 5-reference set, restricted to content
// units when the suggester is content-only.
world::TokenSet scoring_reference(const world::Example& example, const world::Vocabulary& vocab,
                                  bool content_only);

// Suggestions for each example; sampling noise for example i comes from
// derive_seed(seed, example.index).
std::vector<SuggestionOutput> predict_suggestions(const SuggesterModel& model,
                                                  std::span<const world::Example> examples,
                                                  int steps, std::uint64_t seed);

metrics::SuggestionScore evaluate_suggester(const SuggesterModel& model,
                                            std::span<const world::Example> examples,
                                            const world::Vocabulary& vocab, int steps,
                                            bool content_only, std::uint64_t seed);

// Throws sst::Error naming the epoch and step when the loss diverges.
SuggesterTrainResult train_suggester(const SuggesterConfig& config, const world::Dataset& data,
                                     const world::Vocabulary& vocab,
                                     const SuggesterTrainOptions& options);

}  // namespace sst::suggest
