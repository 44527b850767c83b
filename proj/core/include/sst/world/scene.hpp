#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sst/autodiff/tensor.hpp"

namespace sst::world {

inline constexpr int kGridSide = 4;
inline constexpr int kCells = kGridSide * kGridSide;
inline constexpr int kNumObjects = 12;
inline constexpr int kNumColors = 6;
inline constexpr int kNumActions = 6;  // index 0 is "no action"
inline constexpr int kMaxObjectsPerScene = 4;
inline constexpr int kRefsPerScene = 5;
inline constexpr int kMaxCaptionTokens = 16;
// one-hot object | one-hot color | one-hot action | (row, col) | empty flag
inline constexpr int kFeatureDim = kNumObjects + kNumColors + kNumActions + 2 + 1;

struct SceneObject {
  int object = 0;
  int color = 0;
  int action = 0;
  int cell = 0;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct Scene {
  std::uint64_t seed = 0;
  std::vector<SceneObject> objects;

  friend bool operator==(const Scene&, const Scene&) = default;
};

using Caption = std::vector<std::string>;

struct ReferenceSet {
  std::array<Caption, kRefsPerScene> captions;

  friend bool operator==(const ReferenceSet&, const ReferenceSet&) = default;
};

// Grammar lexicon. Each object noun and each action verb has two surface forms.
std::string_view noun_form(int object, int variant);
std::string_view color_word(int color);
std::string_view verb_form(int action, int variant);  // action in [1, kNumActions)
// Nouns, verbs and numerals are content words in the synthetic grammar.
bool is_content_word(std::string_view word);

// Scene drawn from `seed`: 1-4 objects (uniform), distinct cells.
Scene sample_scene(std::uint64_t seed);
// Five template captions; wording choices are driven by the scene seed.
ReferenceSet describe_scene(const Scene& scene);
// [kCells x kFeatureDim] feature grid.
Tensor feature_grid(const Scene& scene);

std::string join_caption(const Caption& caption);
// Lower-cases, drops punctuation and splits on whitespace.
Caption tokenize(std::string_view text);

}  // namespace sst::world
