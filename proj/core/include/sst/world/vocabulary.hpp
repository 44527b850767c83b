#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sst/world/scene.hpp"

namespace sst::world {

// Token (or n-gram) <-> id bijection with fixed special ids. Regular units are
// ordered lexicographically so ids are stable for a given corpus.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kMask = 3;
  static constexpr int kUnk = 4;
  static constexpr int kNumSpecial = 5;

  Vocabulary();

  // Units occurring fewer than `min_freq` times map to UNK. For n > 1 the units
  // are sliding-window n-grams joined by single spaces.
  static Vocabulary build(std::span<const Caption> corpus, int min_freq = 5, int n = 1);

  int id(std::string_view unit) const;  // kUnk when absent
  const std::string& unit(int id) const;
  std::size_t size() const { return units_.size(); }
  int order() const { return order_; }
  bool is_special(int id) const { return id >= 0 && id < kNumSpecial; }
  // Units containing at least one content word (noun, verb, numeral).
  bool is_content(int id) const;

  // Sliding-window units of a caption (plain tokens when order() == 1).
  std::vector<std::string> units_of(const Caption& caption) const;
  std::vector<int> encode(const Caption& caption) const;
  Caption decode(std::span<const int> ids) const;  // stops at EOS, skips PAD/BOS

  std::string to_json() const;
  static Vocabulary from_json(std::string_view text);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.order_ == b.order_ && a.units_ == b.units_;
  }

 private:
  void index();

  int order_ = 1;
  std::vector<std::string> units_;
  std::vector<bool> content_;
  std::map<std::string, int, std::less<>> ids_;
};

std::vector<std::string> ngrams(const Caption& caption, int n);

}  // namespace sst::world
