#include <doctest.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <set>

#include "sst/error.hpp"
#include "sst/rng.hpp"
#include "sst/world/dataset.hpp"
#include "sst/world/token_set.hpp"
#include "sst/world/vocabulary.hpp"

using namespace sst;
using namespace sst::world;

namespace {

Caption words(std::string_view text) { return tokenize(text); }

std::vector<int> unit_ids(const TokenSet& s) { return s.units; }

}  // namespace

TEST_CASE("generation is deterministic") {
  const Dataset a = generate_dataset(1, 0);
  const Dataset b = generate_dataset(1, 0);
  CHECK(a.examples[0].scene == b.examples[0].scene);
  CHECK(a.examples[0].refs == b.examples[0].refs);
  CHECK(a.examples[0].grid == b.examples[0].grid);
  CHECK_THROWS_AS(generate_dataset(0, 0), Error);
}

TEST_CASE("90/5/5 split by index") {
  const Dataset d = generate_dataset(2000, 1);
  CHECK(d.split(Split::train).size() == 1800);
  CHECK(d.split(Split::val).size() == 100);
  CHECK(d.split(Split::test).size() == 100);
  CHECK(d.split(Split::val).front().index == 1800);
}

TEST_CASE("object counts are uniform on 1..4") {
  std::array<int, kMaxObjectsPerScene + 1> hist{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++hist[sample_scene(derive_seed(77, i)).objects.size()];
  CHECK(hist[0] == 0);
  for (int k = 1; k <= kMaxObjectsPerScene; ++k) {
    CHECK(std::abs(hist[k] / double(n) - 0.25) < 0.03);
  }
}

TEST_CASE("scene and grid invariants") {
  for (std::uint64_t s = 0; s < 500; ++s) {
    const Scene scene = sample_scene(s);
    REQUIRE(!scene.objects.empty());
    std::set<int> cells;
    for (const auto& o : scene.objects) cells.insert(o.cell);
    CHECK(cells.size() == scene.objects.size());

    const Tensor grid = feature_grid(scene);
    CHECK(grid.rows() == std::size_t(kCells));
    CHECK(grid.cols() == std::size_t(kFeatureDim));
    for (int c = 0; c < kCells; ++c) {
      double object_bits = 0;
      for (int j = 0; j < kNumObjects; ++j) object_bits += grid(c, j);
      const double empty = grid(c, kFeatureDim - 1);
      CHECK(object_bits + empty == 1.0);
      CHECK(object_bits == (cells.count(c) ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("reference captions mention every object and vary") {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const Scene scene = sample_scene(s);
    const ReferenceSet refs = describe_scene(scene);
    std::set<Caption> distinct;
    for (const auto& cap : refs.captions) {
      CHECK(!cap.empty());
      CHECK(cap.size() <= std::size_t(kMaxCaptionTokens));
      distinct.insert(cap);
      for (const auto& o : scene.objects) {
        const bool mentioned =
            std::find(cap.begin(), cap.end(), noun_form(o.object, 0)) != cap.end() ||
            std::find(cap.begin(), cap.end(), noun_form(o.object, 1)) != cap.end();
        CHECK(mentioned);
      }
    }
    if (scene.objects.size() > 1) CHECK(distinct.size() > 1);
  }
}

TEST_CASE("vocabulary frequency filter") {
  std::vector<Caption> corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back(words("a zebra"));
  corpus.push_back(words("a cube"));
  const Vocabulary v = Vocabulary::build(corpus, 5);
  CHECK(v.id("zebra") == Vocabulary::kUnk);
  CHECK(v.id("a") >= Vocabulary::kNumSpecial);

  const Vocabulary all = Vocabulary::build(corpus, 1);
  CHECK(all.size() == Vocabulary::kNumSpecial + 3);
  CHECK(all.unit(Vocabulary::kPad) != all.unit(Vocabulary::kMask));
  CHECK_THROWS_AS(Vocabulary::build(std::vector<Caption>{}, 1), Error);
}

TEST_CASE("bigram units") {
  const std::vector<Caption> corpus{words("a red cube")};
  const Vocabulary v = Vocabulary::build(corpus, 1, 2);
  CHECK(v.size() == Vocabulary::kNumSpecial + 2);
  CHECK(v.id("a red") >= Vocabulary::kNumSpecial);
  CHECK(v.id("red cube") >= Vocabulary::kNumSpecial);
  CHECK(ngrams(words("a red cube"), 2) == std::vector<std::string>{"a red", "red cube"});
}

TEST_CASE("vocabulary round trips") {
  const Dataset d = generate_dataset(200, 4);
  const auto corpus = d.training_captions();
  const Vocabulary v = Vocabulary::build(corpus, 1);
  for (const auto& cap : corpus) CHECK(v.decode(v.encode(cap)) == cap);
  CHECK(Vocabulary::from_json(v.to_json()) == v);
  CHECK(Vocabulary::build(corpus, 1) == v);
}

TEST_CASE("unique token sets") {
  std::vector<Caption> corpus{words("a red cube sleeps"), words("the cube rests")};
  const Vocabulary v = Vocabulary::build(corpus, 1);

  ReferenceSet same;
  for (auto& c : same.captions) c = words("a red cube");
  const TokenSet s = unique_token_set(same, v);
  CHECK(unit_ids(s) == std::vector<int>{v.id("a"), v.id("cube"), v.id("red")});

  ReferenceSet one;
  for (auto& c : one.captions) c = words("a red cube sleeps");
  TokenSetOptions content;
  content.content_only = true;
  const TokenSet c = unique_token_set(one, v, content);
  std::vector<int> expected{v.id("cube"), v.id("sleeps")};
  std::sort(expected.begin(), expected.end());
  CHECK(unit_ids(c) == expected);

  ReferenceSet unknown;
  for (auto& cap : unknown.captions) cap = words("zzz");
  CHECK_THROWS_AS(unique_token_set(unknown, v), Error);
}

TEST_CASE("token set properties on generated scenes") {
  const Dataset d = generate_dataset(300, 5);
  const auto corpus = d.training_captions();
  const Vocabulary v = Vocabulary::build(corpus, 1);
  TokenSetOptions one;
  one.refs_per_image = 1;
  for (const auto& ex : d.examples) {
    const TokenSet five = unique_token_set(ex.refs, v);
    const TokenSet first = unique_token_set(ex.refs, v, one);
    CHECK(std::is_sorted(five.units.begin(), five.units.end()));
    CHECK(std::adjacent_find(five.units.begin(), five.units.end()) == five.units.end());
    CHECK(five.size() >= 1);
    CHECK(five.size() <= kMaxSuggestions);
    CHECK(TokenSet::from_units(five.units, v) == five);
    CHECK(content_units(content_units(five)) == content_units(five));
    if (five.size() < kMaxSuggestions) {
      for (int u : first.units) CHECK(five.contains(u));
    }
    for (const auto& o : ex.scene.objects) {
      CHECK((five.contains(v.id(noun_form(o.object, 0))) ||
             five.contains(v.id(noun_form(o.object, 1)))));
    }
  }
}

TEST_CASE("dataset cache round trip") {
  const Dataset d = generate_dataset(30, 6);
  const auto path = std::filesystem::temp_directory_path() / "sst_test_dataset.jsonl";
  save_dataset(path, d);
  const Dataset back = load_dataset(path, 6);
  REQUIRE(back.examples.size() == d.examples.size());
  CHECK(back.train_end == d.train_end);
  for (std::size_t i = 0; i < d.examples.size(); ++i) {
    CHECK(back.examples[i].scene == d.examples[i].scene);
    CHECK(back.examples[i].refs == d.examples[i].refs);
    CHECK(back.examples[i].grid == d.examples[i].grid);
  }
  std::filesystem::remove(path);
}
