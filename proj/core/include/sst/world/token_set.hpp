#pragma once

#include <cstddef>
#include <vector>

#include "sst/world/scene.hpp"
#include "sst/world/vocabulary.hpp"

namespace sst::world {

// Maximum number of suggestion units per scene.
inline constexpr std::size_t kMaxSuggestions = 24;

// Duplicate-free units in ascending id order, with a content flag per unit.
struct TokenSet {
  std::vector<int> units;
  std::vector<bool> content;

  std::size_t size() const { return units.size(); }
  bool empty() const { return units.empty(); }
  bool contains(int id) const;

  static TokenSet from_units(std::vector<int> ids, const Vocabulary& vocab);
  friend bool operator==(const TokenSet&, const TokenSet&) = default;
};

struct TokenSetOptions {
  int refs_per_image = 5;  // 1 or 5
  bool content_only = false;
  std::size_t max_units = kMaxSuggestions;
};

// Unique in-vocabulary units of the references. UNK and specials are dropped.
// When more than `max_units` remain, the most frequent are kept (ties go to
// the lower id). Throws when the result is empty.
TokenSet unique_token_set(const ReferenceSet& refs, const Vocabulary& vocab,
                          const TokenSetOptions& options = {});

// Restricts a set to its content units.
TokenSet content_units(const TokenSet& set);

}  // namespace sst::world
