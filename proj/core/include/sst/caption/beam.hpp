#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sst/caption/model.hpp"

namespace sst::caption {

// Log-probabilities of the next token given a prefix (BOS first).
using NextTokenScorer = std::function<std::vector<double>(std::span<const int> prefix)>;

struct BeamOptions {
  std::size_t beam = 3;
  // Most tokens generated, EOS included.
  std::size_t max_len = 18;
  int bos = 1;
  int eos = 2;
  std::vector<int> banned;  // never expanded
};

struct Hypothesis {
  std::vector<int> tokens;  // generated tokens, without BOS
  double log_prob = 0.0;
  bool finished = false;

  // Cumulative log-probability per generated token (EOS counts).
  double score() const;
};

// Beam search with length-normalized ranking. Each step expands every running
// hypothesis by every allowed token and keeps the best `beam` candidates;
// candidates ending in EOS retire to the completed pool. Stops at max_len or
// when nothing is running. Returns the best completed hypothesis, or the best
// running one when none completed. Equal scores prefer the lexicographically
// smaller token sequence.
Hypothesis beam_search(const NextTokenScorer& scorer, const BeamOptions& options);

// Argmax decoding with the same token restrictions.
Hypothesis greedy_decode(const NextTokenScorer& scorer, const BeamOptions& options);

// Scorer over a frozen captioner for one scene. The encoder runs once.
class CaptionerScorer {
 public:
  CaptionerScorer(const CaptionerModel& model, const Tensor& grid, const SuggestionUnits* units);
  std::vector<double> operator()(std::span<const int> prefix) const;

 private:
  const CaptionerModel* model_;
  Tensor memory_;
  Tensor suggestions_;
};

// Beam options for a captioner: specials other than EOS are banned.
BeamOptions captioner_beam_options(const CaptionerModel& model, std::size_t beam);

// Decodes one scene; returned tokens exclude EOS.
Hypothesis caption_scene(const CaptionerModel& model, const Tensor& grid,
                         const SuggestionUnits* units, std::size_t beam);

}  // namespace sst::caption
