#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "sst/error.hpp"
#include "sst/metrics/caption_metrics.hpp"
#include "sst/metrics/suggestion_score.hpp"
#include "sst/world/vocabulary.hpp"

using namespace sst;
using namespace sst::metrics;
using world::TokenSet;
using world::tokenize;

namespace {

TokenSet set_of(std::vector<int> ids) {
  TokenSet s;
  std::sort(ids.begin(), ids.end());
  s.units = ids;
  s.content.assign(ids.size(), false);
  return s;
}

struct Corpus {
  std::vector<Caption> candidates;
  std::vector<RefList> references;
  std::array<double, 4> bleu{};
  double cider_d = 0.0;
};

Corpus fixture(const std::string& name) {
  std::ifstream in(std::string(SST_FIXTURE_DIR) + "/metric_fixtures.json");
  REQUIRE(in.good());
  const auto j = nlohmann::json::parse(in).at(name);
  Corpus c;
  for (const auto& t : j.at("candidates")) c.candidates.push_back(tokenize(t.get<std::string>()));
  for (const auto& refs : j.at("references")) {
    RefList rl;
    for (const auto& t : refs) rl.push_back(tokenize(t.get<std::string>()));
    c.references.push_back(rl);
  }
  for (int n = 0; n < 4; ++n) c.bleu[n] = j.at("bleu").at(n).get<double>();
  c.cider_d = j.at("cider_d").get<double>();
  return c;
}

}  // namespace

TEST_CASE("precision recall f1 hand cases") {
  // a=5, b=6, c=7, d=8
  const auto s = suggestion_prf(set_of({5, 6}), set_of({6, 7, 8}));
  CHECK(s.precision == 0.5);
  CHECK(s.recall == 1.0 / 3.0);
  CHECK(s.f1 == doctest::Approx(0.4).epsilon(1e-15));

  const auto perfect = suggestion_prf(set_of({5, 9}), set_of({5, 9}));
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  const auto empty = suggestion_prf(TokenSet{}, set_of({5}));
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);

  CHECK(suggestion_prf(set_of({5}), set_of({5, 6, 7})).precision == 1.0);
  CHECK(suggestion_prf(set_of({5, 6, 7, 9}), set_of({5, 6})).recall == 1.0);
  CHECK(f1_from(0.0, 0.0) == 0.0);
}

TEST_CASE("corpus suggestion score averages per image") {
  SuggestionScorer scorer;
  scorer.add(set_of({5, 6}), set_of({6, 7, 8}));
  scorer.add(set_of({5}), set_of({5}));
  const auto s = scorer.score();
  CHECK(s.precision == 0.75);
  CHECK(s.recall == doctest::Approx((1.0 / 3.0 + 1.0) / 2).epsilon(1e-15));
  CHECK(s.f1 == doctest::Approx(f1_from(s.precision, s.recall)).epsilon(1e-15));
  CHECK(scorer.count() == 2);
}

TEST_CASE("content-only scoring restricts both sets") {
  TokenSet suggested = set_of({5, 6, 7});
  suggested.content = {true, false, true};
  TokenSet reference = set_of({5, 8});
  reference.content = {true, false};
  SuggestionScorer scorer(true);
  scorer.add(suggested, reference);
  CHECK(scorer.score().precision == 0.5);
  CHECK(scorer.score().recall == 1.0);
}

TEST_CASE("bleu identity and disjoint") {
  const std::vector<Caption> c{tokenize("a red cube near a blue ball")};
  const std::vector<RefList> r{{c[0]}};
  for (int n = 1; n <= 4; ++n) CHECK(bleu(c, r, n) == 1.0);
  const std::vector<Caption> d{tokenize("two dogs jump")};
  CHECK(bleu(d, r, 1) == 0.0);
  CHECK_THROWS_AS(bleu(std::vector<Caption>{}, std::vector<RefList>{}, 1), Error);
  CHECK_THROWS_AS(bleu(c, r, 5), Error);
}

TEST_CASE("bleu and cider-d match the toy fixtures") {
  for (const char* name : {"toy", "short"}) {
    const Corpus corpus = fixture(name);
    CAPTURE(name);
    const auto b = bleu_all(corpus.candidates, corpus.references);
    for (int n = 0; n < 4; ++n) CHECK(std::abs(b[n] - corpus.bleu[n]) < 1e-9);
    const double c = CiderD(corpus.references).corpus_score(corpus.candidates);
    CHECK(std::abs(c - corpus.cider_d) < 1e-9);
  }
}

TEST_CASE("bleu never drops when a matching reference is added") {
  Corpus corpus = fixture("toy");
  const auto before = bleu_all(corpus.candidates, corpus.references);
  for (std::size_t i = 0; i < corpus.candidates.size(); ++i) corpus.references[i].push_back(corpus.candidates[i]);
  const auto after = bleu_all(corpus.candidates, corpus.references);
  for (int n = 0; n < 4; ++n) CHECK(after[n] >= before[n]);
}

TEST_CASE("cider-d identity, disjoint and order") {
  const std::vector<RefList> single{{tokenize("a red cube")}};
  const CiderD one(single);
  CHECK(one.degenerate());
  const std::vector<Caption> same{tokenize("a red cube")};
  CHECK(one.corpus_score(same) == 0.0);  // every IDF weight is zero

  const Corpus corpus = fixture("toy");
  const CiderD cider(corpus.references);
  CHECK(!cider.degenerate());
  CHECK(cider.score(tokenize("zebra giraffe"), 0) == 0.0);
  // A reference scores at least as well as any other candidate for its image.
  const double self = cider.score(corpus.references[0][0], 0);
  CHECK(self > cider.score(corpus.candidates[0], 0));

  // Reordering the corpus (with its references) leaves the mean unchanged.
  std::vector<Caption> cands = corpus.candidates;
  std::vector<RefList> refs = corpus.references;
  std::reverse(cands.begin(), cands.end());
  std::reverse(refs.begin(), refs.end());
  CHECK(CiderD(refs).corpus_score(cands) ==
        doctest::Approx(cider.corpus_score(corpus.candidates)).epsilon(1e-12));
}

TEST_CASE("caption scores stay in range") {
  const Corpus corpus = fixture("toy");
  const auto s = caption_scores(corpus.candidates, corpus.references);
  for (double b : s.bleu) {
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
  }
  CHECK(std::isfinite(s.cider_d));
  CHECK(s.cider_d >= 0.0);
}
