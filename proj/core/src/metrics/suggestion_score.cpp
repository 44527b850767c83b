#include "sst/metrics/suggestion_score.hpp"

#include <algorithm>
#include <iterator>

namespace sst::metrics {

double f1_from(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

SuggestionScore suggestion_prf(const world::TokenSet& suggested, const world::TokenSet& reference) {
  std::vector<int> common;
  std::set_intersection(suggested.units.begin(), suggested.units.end(), reference.units.begin(),
                        reference.units.end(), std::back_inserter(common));
  const auto correct = static_cast<double>(common.size());
  SuggestionScore s;
  s.precision = suggested.empty() ? 0.0 : correct / static_cast<double>(suggested.size());
  s.recall = reference.empty() ? 0.0 : correct / static_cast<double>(reference.size());
  s.f1 = f1_from(s.precision, s.recall);
  return s;
}

void SuggestionScorer::add(const world::TokenSet& suggested, const world::TokenSet& reference) {
  const SuggestionScore s = content_only_
                                ? suggestion_prf(world::content_units(suggested), world::content_units(reference))
                                : suggestion_prf(suggested, reference);
  precision_sum_ += s.precision;
  recall_sum_ += s.recall;
  ++count_;
}

SuggestionScore SuggestionScorer::score() const {
  SuggestionScore s;
  if (count_ == 0) return s;
  s.precision = precision_sum_ / static_cast<double>(count_);
  s.recall = recall_sum_ / static_cast<double>(count_);
  s.f1 = f1_from(s.precision, s.recall);
  return s;
}

}  // namespace sst::metrics
