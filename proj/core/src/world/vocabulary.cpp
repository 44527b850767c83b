#include "sst/world/vocabulary.hpp"

#include <json.hpp>

#include "sst/error.hpp"

namespace sst::world {

std::vector<std::string> ngrams(const Caption& caption, int n) {
  if (n < 1) throw Error("ngrams: order must be >= 1");
  std::vector<std::string> out;
  const auto len = static_cast<int>(caption.size());
  for (int i = 0; i + n <= len; ++i) {
    std::string g = caption[static_cast<std::size_t>(i)];
    for (int k = 1; k < n; ++k) {
      g.push_back(' ');
      g += caption[static_cast<std::size_t>(i + k)];
    }
    out.push_back(std::move(g));
  }
  return out;
}

Vocabulary::Vocabulary() {
  units_ = {"<pad>", "<bos>", "<eos>", "<mask>", "<unk>"};
  index();
}

Vocabulary Vocabulary::build(std::span<const Caption> corpus, int min_freq, int n) {
  if (corpus.empty()) throw Error("build_vocabulary: empty corpus");
  if (n < 1 || n > 3) throw Error("build_vocabulary: n-gram order must be 1, 2 or 3");
  std::map<std::string, int> counts;
  for (const auto& caption : corpus) {
    for (auto& u : ngrams(caption, n)) ++counts[u];
  }
  Vocabulary v;
  v.order_ = n;
  for (const auto& [u, c] : counts) {
    if (c >= min_freq) v.units_.push_back(u);
  }
  v.index();
  return v;
}

void Vocabulary::index() {
  ids_.clear();
  content_.assign(units_.size(), false);
  for (std::size_t i = 0; i < units_.size(); ++i) {
    ids_.emplace(units_[i], static_cast<int>(i));
    if (i >= static_cast<std::size_t>(kNumSpecial)) {
      for (const auto& word : tokenize(units_[i])) {
        if (is_content_word(word)) content_[i] = true;
      }
    }
  }
}

int Vocabulary::id(std::string_view unit) const {
  auto it = ids_.find(unit);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::unit(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= units_.size()) {
    throw Error("vocabulary id out of range: " + std::to_string(id));
  }
  return units_[static_cast<std::size_t>(id)];
}

bool Vocabulary::is_content(int id) const {
  return id >= 0 && static_cast<std::size_t>(id) < content_.size() &&
         content_[static_cast<std::size_t>(id)];
}

std::vector<std::string> Vocabulary::units_of(const Caption& caption) const {
  return ngrams(caption, order_);
}

std::vector<int> Vocabulary::encode(const Caption& caption) const {
  std::vector<int> out;
  for (const auto& u : units_of(caption)) out.push_back(id(u));
  return out;
}

Caption Vocabulary::decode(std::span<const int> ids) const {
  Caption out;
  for (int i : ids) {
    if (i == kEos) break;
    if (i == kPad || i == kBos) continue;
    out.push_back(unit(i));
  }
  return out;
}

std::string Vocabulary::to_json() const {
  nlohmann::json j;
  j["order"] = order_;
  j["units"] = units_;
  return j.dump();
}

Vocabulary Vocabulary::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  Vocabulary v;
  v.order_ = j.at("order").get<int>();
  v.units_ = j.at("units").get<std::vector<std::string>>();
  if (v.units_.size() < static_cast<std::size_t>(kNumSpecial) || v.units_[0] != "<pad>") {
    throw Error("vocabulary json: missing special units");
  }
  v.index();
  return v;
}

}  // namespace sst::world
