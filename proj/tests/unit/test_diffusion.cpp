#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "sst/autodiff/ops.hpp"
#include "sst/error.hpp"
#include "sst/suggest/losses.hpp"
#include "sst/suggest/sampler.hpp"
#include "sst/suggest/trainer.hpp"
#include "sst/world/dataset.hpp"
#include "../support/oracles.hpp"

using namespace sst;
using namespace sst::suggest;
using sst::testing::perfect_denoiser;
using world::Vocabulary;

namespace {

constexpr Framework kAll[] = {Framework::direct, Framework::absorbing, Framework::reparametrized,
                              Framework::analog_bit};

SuggesterConfig small_config(std::size_t vocab, Framework f) {
  SuggesterConfig c;
  c.vocab_size = vocab;
  c.hidden = 8;
  c.layers = 1;
  c.heads = 2;
  c.ff_dim = 16;
  c.framework = f;
  return c;
}

void zero(ad::ParameterStore& store, std::string_view name) {
  for (double& v : store.value(name).values()) v = 0.0;
}

}  // namespace

TEST_CASE("linear schedule") {
  const Schedule s(20);
  CHECK(s.alpha(0) == 1.0);
  CHECK(s.alpha(20) == 0.0);
  for (int t = 1; t <= 20; ++t) CHECK(s.alpha(t) <= s.alpha(t - 1));
  CHECK_THROWS_AS(s.alpha(21), Error);
  CHECK_THROWS_AS(s.alpha(-1), Error);
  CHECK_THROWS_AS(Schedule(0), Error);
}

TEST_CASE("framework names round trip") {
  for (Framework f : kAll) CHECK(parse_framework(framework_name(f)) == f);
  CHECK_THROWS_AS(parse_framework("ddpm"), Error);
}

TEST_CASE("forward corruption endpoints") {
  const Schedule s(20);
  const std::vector<int> x0{5, 7, 9, 11};
  Rng rng(1);
  CHECK(forward_corrupt(x0, 0, s, Framework::absorbing, Vocabulary::kMask, 12, rng).tokens == x0);
  const auto full = forward_corrupt(x0, 20, s, Framework::reparametrized, Vocabulary::kMask, 12, rng);
  CHECK(std::all_of(full.tokens.begin(), full.tokens.end(), [](int t) { return t == Vocabulary::kMask; }));
  const auto clean = forward_corrupt(x0, 0, s, Framework::analog_bit, Vocabulary::kMask, 12, rng);
  CHECK(clean.bits == encode_bits(x0, codeword_width(12)));
  CHECK_THROWS_AS(forward_corrupt(x0, 21, s, Framework::absorbing, Vocabulary::kMask, 12, rng), Error);
}

TEST_CASE("forward corruption marginals follow the schedule") {
  const Schedule s(20);
  const std::vector<int> x0{5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  Rng rng(2);
  for (int t : {1, 5, 10, 15, 19}) {
    std::size_t masked = 0;
    const int samples = 1000;  // x 10 positions = 10^4 draws
    for (int i = 0; i < samples; ++i) {
      for (int tok : forward_corrupt(x0, t, s, Framework::absorbing, Vocabulary::kMask, 20, rng).tokens) {
        masked += tok == Vocabulary::kMask;
      }
    }
    CAPTURE(t);
    CHECK(std::abs(masked / 1e4 - (1.0 - s.alpha(t))) < 0.02);
  }
  // Analog-bit: noise variance 1 - alpha_t around sqrt(alpha_t) * bits.
  const int t = 10;
  const std::size_t width = codeword_width(20);
  const Tensor clean = encode_bits(x0, width);
  double sq = 0.0;
  std::size_t n = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto st = forward_corrupt(x0, t, s, Framework::analog_bit, Vocabulary::kMask, 20, rng);
    for (std::size_t j = 0; j < clean.size(); ++j) {
      const double e = st.bits[j] - std::sqrt(s.alpha(t)) * clean[j];
      sq += e * e;
      ++n;
    }
  }
  CHECK(std::abs(sq / n - (1.0 - s.alpha(t))) < 0.02);
}

TEST_CASE("codewords") {
  CHECK(codeword_width(1) == 1);
  CHECK(codeword_width(2) == 1);
  CHECK(codeword_width(9) == 4);
  CHECK(codeword_width(16) == 4);
  CHECK(codeword(5, 4) == std::vector<double>{1, -1, 1, -1});
}

TEST_CASE("sampler commit schedule") {
  CHECK(commit_target(10, 5, 5) == 2);
  CHECK(commit_target(10, 1, 5) == 10);
  CHECK(commit_target(7, 3, 4) == 4);
  CHECK(model_step(20, 20, 20) == 20);
  CHECK(model_step(1, 5, 20) == 4);
  CHECK(model_step(1, 1, 20) == 20);
}

TEST_CASE("perfect denoiser recovers x0 for every framework and step count") {
  const std::size_t vocab = 30;
  const std::size_t positions = world::kMaxSuggestions;
  Rng pick(3);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<int> x0;
    for (int id = Vocabulary::kNumSpecial; id < int(vocab); ++id) x0.push_back(id);
    pick.shuffle(x0);
    x0.resize(1 + pick.below(positions));
    for (Framework f : kAll) {
      for (int steps : {1, 5, 20}) {
        SamplerOptions o;
        o.framework = f;
        o.steps = steps;
        o.vocab_size = vocab;
        o.length = is_discrete(f) ? x0.size() : positions;
        Rng rng(trial);
        const auto out = run_sampler(perfect_denoiser(x0, vocab, f, positions), o, rng);
        std::vector<int> sorted = x0;
        std::sort(sorted.begin(), sorted.end());
        CAPTURE(framework_name(f));
        CAPTURE(steps);
        CHECK(out.units == sorted);
      }
    }
  }
}

TEST_CASE("sampler argument errors") {
  SamplerOptions o;
  o.vocab_size = 10;
  o.length = 3;
  Rng rng(0);
  const Denoiser d = [](const NoisyState& s) { return Tensor::matrix(s.length(), 10); };
  o.steps = 0;
  CHECK_THROWS_AS(run_sampler(d, o, rng), Error);
  o.steps = 21;
  CHECK_THROWS_AS(run_sampler(d, o, rng), Error);
  o.steps = 5;
  o.length = 0;
  CHECK_THROWS_AS(run_sampler(d, o, rng), Error);
}

TEST_CASE("absorbing with one step equals direct prediction") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SuggesterModel model(small_config(40, Framework::absorbing), seed);
    const Tensor grid = world::feature_grid(world::sample_scene(seed));
    Rng a(seed), b(seed);
    const auto absorbing = sample_suggestions(model, grid, 1, Framework::absorbing, a);
    const auto direct = sample_suggestions(model, grid, 1, Framework::direct, b);
    CHECK(absorbing.units == direct.units);
    CHECK(absorbing.decoded_length == direct.decoded_length);
  }
}

TEST_CASE("sampled suggestions are duplicate-free and bounded") {
  for (Framework f : kAll) {
    SuggesterModel model(small_config(60, f), 4);
    for (std::uint64_t s = 0; s < 5; ++s) {
      Rng rng(s);
      const auto out = sample_suggestions(model, world::feature_grid(world::sample_scene(s)), 5, f, rng);
      CHECK(std::adjacent_find(out.units.begin(), out.units.end()) == out.units.end());
      CHECK(std::is_sorted(out.units.begin(), out.units.end()));
      CHECK(out.size() <= world::kMaxSuggestions);
      for (int u : out.units) CHECK(u >= Vocabulary::kNumSpecial);
    }
  }
}

TEST_CASE("denoiser is deterministic and a zero head is uniform") {
  SuggesterModel model(small_config(10, Framework::reparametrized), 5);
  const Tensor grid = world::feature_grid(world::sample_scene(9));
  NoisyState s;
  s.tokens = {Vocabulary::kMask, 6, Vocabulary::kMask};
  s.t = 7;
  CHECK(model.denoise_logits(grid, s) == model.denoise_logits(grid, s));

  NoisyState too_long;
  too_long.tokens.assign(world::kMaxSuggestions + 1, Vocabulary::kMask);
  too_long.t = 1;
  CHECK_THROWS_AS(model.denoise_logits(grid, too_long), Error);

  zero(model.parameters(), "dec.head.w");
  zero(model.parameters(), "dec.head.b");
  const Tensor logits = model.denoise_logits(grid, s);
  for (double v : logits.values()) CHECK(v == 0.0);

  // Uniform logits over |V| = 10 cost ln 10 per masked position.
  ad::Graph g(&model.parameters());
  Rng rng(1);
  const std::vector<int> x0{5, 7, 8};
  const double elbo = elbo_loss(g, model, model.encode(g, grid), x0, 12, rng).value().item();
  CHECK(elbo == doctest::Approx(std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("length loss") {
  SuggesterModel model(small_config(20, Framework::reparametrized), 6);
  zero(model.parameters(), "len.w");
  const Tensor grid = world::feature_grid(world::sample_scene(1));
  ad::Graph g(&model.parameters());
  const ad::Var enc = model.encode(g, grid);
  CHECK(length_loss(g, model, enc, 3).value().item() ==
        doctest::Approx(std::log(double(world::kMaxSuggestions))).epsilon(1e-12));
  CHECK_THROWS_AS(length_loss(g, model, enc, world::kMaxSuggestions + 1), Error);
  CHECK_THROWS_AS(length_loss(g, model, enc, 0), Error);
}

TEST_CASE("a1h closed forms") {
  Tensor onehot = Tensor::matrix(2, 4);
  onehot(0, 1) = 1.0;
  onehot(1, 3) = 1.0;
  const std::vector<int> y{1, 3};
  CHECK(a1h_loss(onehot, y) == 0.0);

  const Tensor uniform = Tensor::matrix(1, 4, 0.25);
  CHECK(a1h_loss(uniform, std::vector<int>{2}) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(a1h_loss(uniform, std::vector<int>{0, 3}) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK_THROWS_AS(a1h_loss(uniform, std::vector<int>{}), Error);
}

TEST_CASE("a1h equals the brute-force minimum") {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t rows = 1 + rng.below(5);
    const std::size_t vocab = 2 + rng.below(7);
    const std::size_t targets = 1 + rng.below(std::min<std::size_t>(5, vocab));
    Tensor p = Tensor::matrix(rows, vocab);
    for (std::size_t r = 0; r < rows; ++r) {
      double z = 0;
      for (std::size_t c = 0; c < vocab; ++c) z += p(r, c) = rng.uniform(0.01, 1.0);
      for (std::size_t c = 0; c < vocab; ++c) p(r, c) /= z;
    }
    std::vector<int> y(vocab);
    for (std::size_t c = 0; c < vocab; ++c) y[c] = int(c);
    rng.shuffle(y);
    y.resize(targets);

    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      double best = std::numeric_limits<double>::infinity();
      for (int t : y) best = std::min(best, -std::log(p(r, std::size_t(t))));
      total += best;
    }
    CHECK(a1h_loss(p, y) == doctest::Approx(total / double(rows)).epsilon(1e-15));
  }
}

TEST_CASE("losses are nonnegative") {
  const Tensor grid = world::feature_grid(world::sample_scene(3));
  const std::vector<int> x0{6, 9, 12, 15};
  for (Framework f : kAll) {
    auto cfg = small_config(20, f);
    cfg.length_penalty = f == Framework::analog_bit;
    SuggesterModel model(cfg, 7);
    for (int i = 0; i < 10; ++i) {
      ad::Graph g(&model.parameters());
      Rng rng(i);
      LossOptions lo;
      lo.a1h = true;
      const auto terms = suggester_loss(g, model, grid, x0, lo, rng);
      CHECK(terms.total.value().item() >= 0.0);
      CHECK(terms.elbo >= 0.0);
      CHECK(terms.length >= 0.0);
      CHECK(terms.a1h >= 0.0);
      CHECK(terms.penalty >= 0.0);
    }
  }
}

TEST_CASE("suggester overfits eight scenes") {
  const auto data = world::generate_dataset(40, 21);
  const auto corpus = data.training_captions();
  const auto vocab = Vocabulary::build(corpus, 1);
  auto cfg = small_config(vocab.size(), Framework::reparametrized);
  cfg.hidden = 32;
  cfg.heads = 4;
  cfg.ff_dim = 64;
  SuggesterTrainOptions opt;
  opt.max_train = 8;
  opt.batch_size = 8;
  opt.epochs = 2000;
  opt.eval_steps = 0;
  opt.adam.peak_lr = 3e-3;
  opt.adam.warmup_steps = 50;
  opt.seed = 3;
  const auto result = train_suggester(cfg, data, vocab, opt);
  const double final_loss = result.log.back().loss;
  MESSAGE("overfit loss " << result.log.front().loss << " -> " << final_loss);
  CHECK(final_loss < 0.05);

  // Fully masked decoding depends on the scene.
  const auto train = data.split(world::Split::train).first(8);
  std::set<std::vector<int>> outputs;
  for (const auto& ex : train) {
    Rng rng(0);
    outputs.insert(sample_suggestions(result.model, ex.grid, 20, cfg.framework, rng).units);
  }
  CHECK(outputs.size() > 1);
}

TEST_CASE("length head beats chance after 500 steps") {
  const auto data = world::generate_dataset(2000, 22);
  const auto corpus = data.training_captions();
  const auto vocab = Vocabulary::build(corpus, 5);
  auto cfg = small_config(vocab.size(), Framework::direct);
  cfg.hidden = 32;
  cfg.heads = 4;
  cfg.ff_dim = 64;
  SuggesterTrainOptions opt;
  opt.max_train = 1600;
  opt.batch_size = 16;
  opt.epochs = 5;  // 100 batches per epoch
  opt.eval_steps = 1;
  opt.eval_every = 0;
  opt.adam.peak_lr = 1e-3;
  opt.adam.warmup_steps = 50;
  opt.seed = 4;
  const auto result = train_suggester(cfg, data, vocab, opt);
  MESSAGE("length accuracy " << result.log.back().length_accuracy);
  CHECK(result.log.back().length_accuracy > 1.0 / double(world::kMaxSuggestions));
}
