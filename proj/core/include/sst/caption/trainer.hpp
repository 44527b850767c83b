#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sst/autodiff/optim.hpp"
#include "sst/caption/beam.hpp"
#include "sst/caption/model.hpp"
#include "sst/caption/provider.hpp"
#include "sst/metrics/caption_metrics.hpp"
#include "sst/world/dataset.hpp"

namespace sst::caption {

// Provider draw index used at inference (training draws use the epoch).
inline constexpr std::uint64_t kInferenceDraw = 0xFFFF'FFFFULL;

struct CaptionerTrainOptions {
  std::size_t epochs = 20;
  std::size_t batch_size = 16;
  ad::AdamConfig adam;  // total_steps 0 means epochs * batches
  std::uint64_t seed = 0;
  // Probability that a training sample gets no suggestions.
  double suggestion_dropout = 0.5;
  std::size_t beam = 3;
  // Beam-search validation every this many epochs (0 = final epoch only);
  // teacher-forced validation loss is logged every epoch.
  std::size_t eval_every = 0;
  bool evaluate = true;
  std::size_t max_train = 0;  // 0 = whole split
  std::size_t max_val = 0;
};

struct CaptionerEpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;            // summed XE per caption, averaged
  double token_accuracy = 0.0;  // teacher-forced argmax hits
  double dropped_fraction = 0.0;
  double val_loss = 0.0;        // suggestions always offered
  bool has_scores = false;
  metrics::CaptionScore val;
};

struct CaptionerTrainResult {
  CaptionerModel model;
  std::vector<CaptionerEpochLog> log;
};

struct CaptionEval {
  std::vector<world::Caption> captions;
  std::vector<double> log_probs;
  std::vector<std::size_t> suggestions_used;
  metrics::CaptionScore scores;
  double xe = 0.0;  // teacher-forced, mean over scenes and references
};

// Decoder input (BOS + words) and targets (words + EOS) of a caption.
std::vector<int> caption_input(const world::Caption& caption, const world::Vocabulary& vocab);
std::vector<int> caption_target(const world::Caption& caption, const world::Vocabulary& vocab);

// Suggestions the captioner receives for a scene (null provider = none).
SuggestionUnits provider_units(const SuggestionProvider* provider, const world::Example& example,
                               const world::Vocabulary& vocab, std::uint64_t draw);

double teacher_forced_xe(const CaptionerModel& model, std::span<const world::Example> examples,
                         const SuggestionProvider* provider, const world::Vocabulary& vocab);

CaptionEval evaluate_captioner(const CaptionerModel& model, std::span<const world::Example> examples,
                               const SuggestionProvider* provider, const world::Vocabulary& vocab,
                               std::size_t beam);

// `provider` may be null (no-suggestion baseline). It must be frozen.
CaptionerTrainResult train_captioner(const CaptionerConfig& config, const world::Dataset& data,
                                     const world::Vocabulary& vocab,
                                     const SuggestionProvider* provider,
                                     const CaptionerTrainOptions& options);

}  // namespace sst::caption
