#include <benchmark/benchmark.h>

#include <vector>

#include "sst/autodiff/ops.hpp"
#include "sst/caption/beam.hpp"
#include "sst/caption/model.hpp"
#include "sst/rng.hpp"
#include "sst/suggest/model.hpp"
#include "sst/suggest/sampler.hpp"
#include "sst/world/scene.hpp"
#include "sst/world/vocabulary.hpp"

using namespace sst;

namespace {

Tensor random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Tensor t = Tensor::matrix(r, c);
  for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

void BM_MatmulForwardBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Tensor a = random_matrix(rng, n, n), b = random_matrix(rng, n, n);
  for (auto _ : state) {
    ad::Graph g;
    ad::Var x = g.variable(a), y = g.variable(b);
    ad::Var loss = ad::sum(ad::matmul(x, y));
    g.backward(loss);
    benchmark::DoNotOptimize(g.grad(x));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_MatmulForwardBackward)->Arg(16)->Arg(64)->Arg(128);

void BM_AttentionForwardBackward(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 32;
  Rng rng(2);
  const Tensor q = random_matrix(rng, len, dim), k = random_matrix(rng, len, dim), v = random_matrix(rng, len, dim);
  for (auto _ : state) {
    ad::Graph g;
    ad::Var qv = g.variable(q), kv = g.variable(k), vv = g.variable(v);
    g.backward(ad::sum(ad::attention(qv, kv, vv)));
    benchmark::DoNotOptimize(g.grad(qv));
  }
}
BENCHMARK(BM_AttentionForwardBackward)->Arg(16)->Arg(64)->Arg(128);

void BM_BeamSearch(benchmark::State& state) {
  caption::CaptionerConfig c;
  c.vocab_size = 60;
  c.hidden = 64;
  c.layers = 3;
  c.heads = 4;
  c.ff_dim = 128;
  c.integration = caption::Integration::D;
  const caption::CaptionerModel model(c, 3);
  const Tensor grid = world::feature_grid(world::sample_scene(4));
  const caption::SuggestionUnits units{{7}, {9}, {12}, {20}};
  const auto beam = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(caption::caption_scene(model, grid, &units, beam));
  }
}
BENCHMARK(BM_BeamSearch)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SuggestionSampling(benchmark::State& state) {
  suggest::SuggesterConfig c;
  c.vocab_size = 60;
  c.hidden = 64;
  c.layers = 2;
  c.heads = 4;
  c.ff_dim = 128;
  c.framework = suggest::Framework::reparametrized;
  const suggest::SuggesterModel model(c, 5);
  const Tensor grid = world::feature_grid(world::sample_scene(6));
  const int steps = static_cast<int>(state.range(0));
  Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(suggest::sample_suggestions(model, grid, steps, c.framework, rng));
  }
}
BENCHMARK(BM_SuggestionSampling)->Arg(1)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
