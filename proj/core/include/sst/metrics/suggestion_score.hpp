#pragma once

#include <span>

#include "sst/world/token_set.hpp"

namespace sst::metrics {

struct SuggestionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

double f1_from(double precision, double recall);

// P = |suggested ∩ K| / |suggested|, R = |suggested ∩ K| / |K|. An empty
// suggestion has P = 0; an empty K has R = 0.
SuggestionScore suggestion_prf(const world::TokenSet& suggested, const world::TokenSet& reference);

// Mean P and R over images; F1 from the means. With `content_only` both sets
// are first restricted to content units.
class SuggestionScorer {
 public:
  explicit SuggestionScorer(bool content_only = false) : content_only_(content_only) {}
  void add(const world::TokenSet& suggested, const world::TokenSet& reference);
  SuggestionScore score() const;
  std::size_t count() const { return count_; }

 private:
  bool content_only_;
  double precision_sum_ = 0.0;
  double recall_sum_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace sst::metrics
