#include "sst/caption/provider.hpp"

#include <sstream>

#include "sst/error.hpp"

namespace sst::caption {

SuggestionUnits to_captioner_units(const world::TokenSet& set, const world::Vocabulary& unit_vocab,
                                   const world::Vocabulary& word_vocab) {
  SuggestionUnits out;
  out.reserve(set.size());
  for (int id : set.units) {
    std::vector<int> words;
    std::istringstream in(unit_vocab.unit(id));
    std::string w;
    while (in >> w) words.push_back(word_vocab.id(w));
    if (words.empty()) throw Error("suggestion unit " + std::to_string(id) + " has no words");
    out.push_back(std::move(words));
  }
  return out;
}

CachedProvider::CachedProvider(const world::Vocabulary& vocab,
                               std::map<std::size_t, world::TokenSet> cache,
                               std::string description)
    : vocab_(vocab), cache_(std::move(cache)), description_(std::move(description)) {}

world::TokenSet CachedProvider::suggest(const world::Example& example, std::uint64_t) const {
  const auto it = cache_.find(example.index);
  if (it == cache_.end()) {
    throw Error("no cached suggestions for scene " + std::to_string(example.index));
  }
  return it->second;
}

}  // namespace sst::caption
