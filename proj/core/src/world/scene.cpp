#include "sst/world/scene.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "sst/error.hpp"
#include "sst/rng.hpp"

namespace sst::world {
namespace {

constexpr std::array<std::array<std::string_view, 2>, kNumObjects> kNouns{{
    {"cube", "block"}, {"ball", "sphere"}, {"ring", "hoop"},   {"box", "crate"},
    {"cup", "mug"},    {"hat", "cap"},     {"car", "auto"},    {"boat", "ship"},
    {"dog", "puppy"},  {"cat", "kitten"},  {"bird", "sparrow"}, {"lamp", "light"},
}};

constexpr std::array<std::string_view, kNumColors> kColors{"red",   "blue",  "green",
                                                           "yellow", "white", "black"};

constexpr std::array<std::array<std::string_view, 2>, kNumActions> kVerbs{{
    {"", ""},
    {"spins", "rotates"},
    {"rolls", "tumbles"},
    {"floats", "hovers"},
    {"jumps", "hops"},
    {"sleeps", "rests"},
}};

constexpr std::array<std::string_view, 5> kCounts{"zero", "one", "two", "three", "four"};
constexpr std::array<std::string_view, 4> kSides{"top", "bottom", "left", "right"};

// Per-scene wording habits shared by all five annotators (with noise).
struct Style {
  std::array<int, kMaxObjectsPerScene> noun_variant{};
  std::array<int, kMaxObjectsPerScene> verb_variant{};
  double color_rate = 0.5;
  double verb_rate = 0.5;
  int opener = 0;
};

struct PhraseChoice {
  bool color = false;
  bool verb = false;
};

void append_phrase(Caption& out, const SceneObject& obj, int noun_variant, int verb_variant,
                   PhraseChoice choice, std::string_view det) {
  out.emplace_back(det);
  if (choice.color) out.emplace_back(kColors[obj.color]);
  out.emplace_back(kNouns[obj.object][noun_variant]);
  if (choice.verb && obj.action != 0) out.emplace_back(kVerbs[obj.action][verb_variant]);
}

std::string_view side_of(int cell, Rng& rng) {
  const int row = cell / kGridSide;
  const int col = cell % kGridSide;
  const bool vertical = rng.bernoulli(0.5);
  if (vertical) return row < kGridSide / 2 ? kSides[0] : kSides[1];
  return col < kGridSide / 2 ? kSides[2] : kSides[3];
}

Caption compose(const Scene& scene, const Style& style, Rng& rng, int budget_level) {
  const std::size_t n = scene.objects.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  Caption out;
  const int opener = rng.bernoulli(0.7) ? style.opener : rng.range(0, 2);
  if (n == 1) {
    if (opener == 1) {
      out = {"a", "picture", "of"};
    } else if (opener == 2) {
      out = {"there", "is"};
    }
  } else if (opener == 1) {
    out = {"a", "scene", "with"};
  } else if (opener == 2) {
    out = {"there", "are", std::string(kCounts[n])};
    out.emplace_back("objects");
  }

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const SceneObject& obj = scene.objects[i];
    if (k > 0) out.emplace_back(rng.bernoulli(0.75) ? "and" : "near");
    const int nv = rng.bernoulli(0.85) ? style.noun_variant[i] : 1 - style.noun_variant[i];
    const int vv = rng.bernoulli(0.85) ? style.verb_variant[i] : 1 - style.verb_variant[i];
    PhraseChoice choice;
    choice.color = budget_level < 2 && rng.bernoulli(style.color_rate);
    choice.verb = budget_level < 1 && rng.bernoulli(style.verb_rate);
    const bool first_single = n == 1 && opener == 0;
    append_phrase(out, obj, nv, vv, choice, first_single || rng.bernoulli(0.8) ? "a" : "the");
  }
  if (n == 1 && budget_level == 0 && rng.bernoulli(0.5)) {
    out.emplace_back("on");
    out.emplace_back("the");
    out.emplace_back(side_of(scene.objects[0].cell, rng));
  }
  return out;
}

}  // namespace

std::string_view noun_form(int object, int variant) { return kNouns.at(object).at(variant); }
std::string_view color_word(int color) { return kColors.at(color); }
std::string_view verb_form(int action, int variant) {
  if (action <= 0 || action >= kNumActions) throw Error("verb_form: action has no verb");
  return kVerbs[action].at(variant);
}

bool is_content_word(std::string_view word) {
  for (const auto& forms : kNouns) {
    if (forms[0] == word || forms[1] == word) return true;
  }
  for (const auto& forms : kVerbs) {
    if (!forms[0].empty() && (forms[0] == word || forms[1] == word)) return true;
  }
  for (std::string_view c : kCounts) {
    if (c == word) return true;
  }
  return false;
}

Scene sample_scene(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x5CE7E));
  Scene scene;
  scene.seed = seed;
  const int count = rng.range(1, kMaxObjectsPerScene);
  std::vector<int> cells(kCells);
  for (int i = 0; i < kCells; ++i) cells[i] = i;
  rng.shuffle(cells);
  for (int i = 0; i < count; ++i) {
    SceneObject obj;
    obj.object = rng.range(0, kNumObjects - 1);
    obj.color = rng.range(0, kNumColors - 1);
    obj.action = rng.range(0, kNumActions - 1);
    obj.cell = cells[static_cast<std::size_t>(i)];
    scene.objects.push_back(obj);
  }
  return scene;
}

ReferenceSet describe_scene(const Scene& scene) {
  if (scene.objects.empty()) throw Error("describe_scene: scene has no objects");
  Rng rng(derive_seed(scene.seed, 0xCA9710));
  Style style;
  for (auto& v : style.noun_variant) v = rng.range(0, 1);
  for (auto& v : style.verb_variant) v = rng.range(0, 1);
  style.color_rate = rng.bernoulli(0.5) ? 0.9 : 0.3;
  style.verb_rate = rng.bernoulli(0.5) ? 0.9 : 0.3;
  style.opener = rng.range(0, 2);

  auto draw = [&] {
    for (int level = 0;; ++level) {
      Caption caption = compose(scene, style, rng, level);
      if (caption.size() <= static_cast<std::size_t>(kMaxCaptionTokens)) return caption;
      if (level >= 2) throw Error("describe_scene: caption does not fit the length budget");
    }
  };
  ReferenceSet refs;
  for (auto& caption : refs.captions) caption = draw();
  if (scene.objects.size() > 1) {
    auto all_same = [&] {
      return std::all_of(refs.captions.begin(), refs.captions.end(),
                         [&](const Caption& c) { return c == refs.captions[0]; });
    };
    while (all_same()) refs.captions.back() = draw();
  }
  return refs;
}

Tensor feature_grid(const Scene& scene) {
  Tensor grid = Tensor::matrix(kCells, kFeatureDim);
  std::array<bool, kCells> occupied{};
  for (const auto& obj : scene.objects) {
    const auto r = static_cast<std::size_t>(obj.cell);
    grid(r, static_cast<std::size_t>(obj.object)) = 1.0;
    grid(r, static_cast<std::size_t>(kNumObjects + obj.color)) = 1.0;
    grid(r, static_cast<std::size_t>(kNumObjects + kNumColors + obj.action)) = 1.0;
    occupied[r] = true;
  }
  constexpr std::size_t pos = kNumObjects + kNumColors + kNumActions;
  for (std::size_t c = 0; c < static_cast<std::size_t>(kCells); ++c) {
    grid(c, pos) = static_cast<double>(c / kGridSide) / (kGridSide - 1);
    grid(c, pos + 1) = static_cast<double>(c % kGridSide) / (kGridSide - 1);
    grid(c, pos + 2) = occupied[c] ? 0.0 : 1.0;
  }
  return grid;
}

std::string join_caption(const Caption& caption) {
  std::string out;
  for (const auto& tok : caption) {
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

Caption tokenize(std::string_view text) {
  Caption out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace sst::world
