#include "sst/harness/pipeline.hpp"

#include <json.hpp>

#include "sst/autodiff/checkpoint.hpp"
#include "sst/error.hpp"
#include "sst/io.hpp"

#ifndef SST_VERSION
#define SST_VERSION "unknown"
#endif

namespace sst::harness {

using nlohmann::json;

const char* code_version() { return SST_VERSION; }

World build_world(const ExperimentConfig& cfg) {
  cfg.validate();
  World w;
  w.data = world::generate_dataset(cfg.dataset_size, cfg.dataset_seed);
  const auto corpus = w.data.training_captions();
  w.words = world::Vocabulary::build(corpus, cfg.min_freq, 1);
  w.units = cfg.ngram == 1 ? w.words : world::Vocabulary::build(corpus, cfg.min_freq, cfg.ngram);
  return w;
}

suggest::SuggesterConfig suggester_config(const ExperimentConfig& cfg, std::size_t vocab_size) {
  suggest::SuggesterConfig c;
  c.vocab_size = vocab_size;
  c.hidden = cfg.sugg_hidden;
  c.layers = cfg.sugg_layers;
  c.heads = cfg.sugg_heads;
  c.ff_dim = cfg.sugg_ff;
  c.diffusion_steps = cfg.diffusion_steps;
  c.framework = suggest::parse_framework(cfg.framework);
  c.length_penalty = cfg.length_penalty;
  c.share_length_encoder = cfg.share_length_encoder;
  return c;
}

suggest::SuggesterTrainOptions suggester_options(const ExperimentConfig& cfg) {
  suggest::SuggesterTrainOptions o;
  o.targets.refs_per_image = cfg.refs;
  o.targets.content_only = cfg.content_only;
  o.a1h = cfg.a1h;
  o.shuffle_set_order = cfg.shuffle_set_order;
  o.epochs = cfg.sugg_epochs;
  o.batch_size = cfg.batch;
  o.adam.peak_lr = cfg.lr;
  o.adam.warmup_steps = cfg.warmup;
  o.seed = derive_seed(cfg.seed, 0x556);
  o.eval_steps = suggest::parse_framework(cfg.framework) == suggest::Framework::direct ? 1 : cfg.sample_steps;
  o.eval_every = 0;
  o.max_train = cfg.max_train;
  o.max_val = cfg.max_val;
  return o;
}

caption::CaptionerConfig captioner_config(const ExperimentConfig& cfg, std::size_t vocab_size) {
  caption::CaptionerConfig c;
  c.vocab_size = vocab_size;
  c.hidden = cfg.cap_hidden;
  c.layers = cfg.cap_layers;
  c.heads = cfg.cap_heads;
  c.ff_dim = cfg.cap_ff;
  c.integration = caption::parse_integration(cfg.integration);
  c.share_reduce_weight = cfg.share_reduce_weight;
  return c;
}

caption::CaptionerTrainOptions captioner_options(const ExperimentConfig& cfg) {
  caption::CaptionerTrainOptions o;
  o.epochs = cfg.cap_epochs;
  o.batch_size = cfg.batch;
  o.adam.peak_lr = cfg.lr;
  o.adam.warmup_steps = cfg.warmup;
  o.seed = derive_seed(cfg.seed, 0xCA9);
  o.suggestion_dropout = cfg.sugg_dropout;
  o.beam = cfg.beam;
  o.max_train = cfg.max_train;
  o.max_val = cfg.max_val;
  return o;
}

std::vector<world::Example> working_examples(const World& w, const ExperimentConfig& cfg) {
  std::vector<world::Example> out;
  auto take = [&](std::span<const world::Example> part, std::size_t cap) {
    if (cap != 0 && cap < part.size()) part = part.first(cap);
    out.insert(out.end(), part.begin(), part.end());
  };
  take(w.data.split(world::Split::train), cfg.max_train);
  take(w.data.split(world::Split::val), cfg.max_val);
  return out;
}

std::unique_ptr<caption::CachedProvider> suggester_provider(const suggest::SuggesterModel& model,
                                                            const World& w,
                                                            const ExperimentConfig& cfg) {
  return suggester_provider(model, w, cfg, working_examples(w, cfg));
}

std::unique_ptr<caption::CachedProvider> suggester_provider(const suggest::SuggesterModel& model,
                                                            const World& w,
                                                            const ExperimentConfig& cfg,
                                                            std::span<const world::Example> examples) {
  const int steps = model.config().framework == suggest::Framework::direct ? 1 : cfg.sample_steps;
  const auto outputs = suggest::predict_suggestions(model, examples, steps, derive_seed(cfg.seed, 0x5A3));
  std::map<std::size_t, world::TokenSet> cache;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    cache[examples[i].index] = world::TokenSet::from_units(outputs[i].units, w.units);
  }
  return std::make_unique<caption::CachedProvider>(w.units, std::move(cache), "suggester");
}

namespace {

void write_sidecar(const std::filesystem::path& path, const json& meta) {
  write_file_atomic(path.string() + ".json", meta.dump(2) + "\n");
}

json read_sidecar(const std::filesystem::path& path) {
  return json::parse(read_file(path.string() + ".json"));
}

}  // namespace

void save_suggester(const std::filesystem::path& path, const suggest::SuggesterModel& model,
                    const world::Vocabulary& units) {
  const auto& c = model.config();
  json meta = {{"kind", "suggester"},
               {"code_version", code_version()},
               {"vocab_size", c.vocab_size},
               {"hidden", c.hidden},
               {"layers", c.layers},
               {"heads", c.heads},
               {"ff_dim", c.ff_dim},
               {"diffusion_steps", c.diffusion_steps},
               {"max_units", c.max_units},
               {"framework", suggest::framework_name(c.framework)},
               {"length_penalty", c.length_penalty},
               {"share_length_encoder", c.share_length_encoder},
               {"vocabulary", json::parse(units.to_json())}};
  ad::save_parameters(path, model.parameters());
  write_sidecar(path, meta);
}

suggest::SuggesterModel load_suggester(const std::filesystem::path& path, world::Vocabulary* units) {
  const json meta = read_sidecar(path);
  if (meta.at("kind") != "suggester") throw Error(path.string() + " is not a suggester checkpoint");
  suggest::SuggesterConfig c;
  c.vocab_size = meta.at("vocab_size");
  c.hidden = meta.at("hidden");
  c.layers = meta.at("layers");
  c.heads = meta.at("heads");
  c.ff_dim = meta.at("ff_dim");
  c.diffusion_steps = meta.at("diffusion_steps");
  c.max_units = meta.at("max_units");
  c.framework = suggest::parse_framework(meta.at("framework").get<std::string>());
  c.length_penalty = meta.at("length_penalty");
  c.share_length_encoder = meta.at("share_length_encoder");
  suggest::SuggesterModel model(c, 0);
  ad::load_parameters(path, model.parameters());
  if (units != nullptr) *units = world::Vocabulary::from_json(meta.at("vocabulary").dump());
  return model;
}

void save_captioner(const std::filesystem::path& path, const caption::CaptionerModel& model,
                    const world::Vocabulary& words) {
  const auto& c = model.config();
  json meta = {{"kind", "captioner"},
               {"code_version", code_version()},
               {"vocab_size", c.vocab_size},
               {"hidden", c.hidden},
               {"layers", c.layers},
               {"heads", c.heads},
               {"ff_dim", c.ff_dim},
               {"max_len", c.max_len},
               {"integration", caption::integration_name(c.integration)},
               {"share_reduce_weight", c.share_reduce_weight},
               {"vocabulary", json::parse(words.to_json())}};
  ad::save_parameters(path, model.parameters());
  write_sidecar(path, meta);
}

caption::CaptionerModel load_captioner(const std::filesystem::path& path, world::Vocabulary* words) {
  const json meta = read_sidecar(path);
  if (meta.at("kind") != "captioner") throw Error(path.string() + " is not a captioner checkpoint");
  caption::CaptionerConfig c;
  c.vocab_size = meta.at("vocab_size");
  c.hidden = meta.at("hidden");
  c.layers = meta.at("layers");
  c.heads = meta.at("heads");
  c.ff_dim = meta.at("ff_dim");
  c.max_len = meta.at("max_len");
  c.integration = caption::parse_integration(meta.at("integration").get<std::string>());
  c.share_reduce_weight = meta.at("share_reduce_weight");
  caption::CaptionerModel model(c, 0);
  ad::load_parameters(path, model.parameters());
  if (words != nullptr) *words = world::Vocabulary::from_json(meta.at("vocabulary").dump());
  return model;
}

}  // namespace sst::harness
