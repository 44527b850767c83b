#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sst/caption/model.hpp"
#include "sst/world/dataset.hpp"
#include "sst/world/token_set.hpp"
#include "sst/world/vocabulary.hpp"

namespace sst::caption {

// Source of suggestions for the captioner. `draw` distinguishes independent
// draws for the same scene (training epochs use the epoch number).
class SuggestionProvider {
 public:
  virtual ~SuggestionProvider() = default;
  // Unit ids in the provider's own vocabulary; may be empty.
  virtual world::TokenSet suggest(const world::Example& example, std::uint64_t draw) const = 0;
  virtual const world::Vocabulary& vocabulary() const = 0;
  virtual std::string describe() const = 0;
};

// Converts provider units to captioner word ids. Words missing from the
// captioner vocabulary become UNK.
SuggestionUnits to_captioner_units(const world::TokenSet& set, const world::Vocabulary& unit_vocab,
                                   const world::Vocabulary& word_vocab);

// Suggestions computed once by a frozen model and looked up by scene index.
class CachedProvider final : public SuggestionProvider {
 public:
  CachedProvider(const world::Vocabulary& vocab, std::map<std::size_t, world::TokenSet> cache,
                 std::string description);
  world::TokenSet suggest(const world::Example& example, std::uint64_t draw) const override;
  const world::Vocabulary& vocabulary() const override { return vocab_; }
  std::string describe() const override { return description_; }

 private:
  world::Vocabulary vocab_;
  std::map<std::size_t, world::TokenSet> cache_;
  std::string description_;
};

}  // namespace sst::caption
