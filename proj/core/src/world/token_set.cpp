#include "sst/world/token_set.hpp"

#include <algorithm>
#include <map>

#include "sst/error.hpp"

namespace sst::world {

bool TokenSet::contains(int id) const {
  return std::binary_search(units.begin(), units.end(), id);
}

TokenSet TokenSet::from_units(std::vector<int> ids, const Vocabulary& vocab) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  TokenSet set;
  set.units = std::move(ids);
  for (int u : set.units) set.content.push_back(vocab.is_content(u));
  return set;
}

TokenSet unique_token_set(const ReferenceSet& refs, const Vocabulary& vocab,
                          const TokenSetOptions& options) {
  if (options.refs_per_image != 1 && options.refs_per_image != kRefsPerScene) {
    throw Error("unique_token_set: refs_per_image must be 1 or 5");
  }
  std::map<int, int> freq;
  for (int r = 0; r < options.refs_per_image; ++r) {
    for (int id : vocab.encode(refs.captions[static_cast<std::size_t>(r)])) {
      if (vocab.is_special(id)) continue;
      if (options.content_only && !vocab.is_content(id)) continue;
      ++freq[id];
    }
  }
  if (freq.empty()) throw Error("unique_token_set: degenerate scene with an empty unit set");
  std::vector<std::pair<int, int>> ranked(freq.begin(), freq.end());
  if (ranked.size() > options.max_units) {
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    ranked.resize(options.max_units);
  }
  std::vector<int> ids;
  for (const auto& [id, count] : ranked) ids.push_back(id);
  return TokenSet::from_units(std::move(ids), vocab);
}

TokenSet content_units(const TokenSet& set) {
  TokenSet out;
  for (std::size_t i = 0; i < set.units.size(); ++i) {
    if (set.content[i]) {
      out.units.push_back(set.units[i]);
      out.content.push_back(true);
    }
  }
  return out;
}

}  // namespace sst::world
