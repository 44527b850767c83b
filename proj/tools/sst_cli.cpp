// Command line front end: dataset generation, training, captioning, evaluation
// and the experiment recipes.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "sst/caption/beam.hpp"
#include "sst/caption/trainer.hpp"
#include "sst/error.hpp"
#include "sst/harness/config.hpp"
#include "sst/harness/pipeline.hpp"
#include "sst/harness/recipes.hpp"
#include "sst/io.hpp"
#include "sst/suggest/trainer.hpp"
#include "sst/world/dataset.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sst;
using harness::ExperimentConfig;

namespace {

// Config file first, then every --<key> flag the user passed.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;
  bool quiet = false;

  void attach(CLI::App& app) {
    app.add_option("-c,--config", file, "Config file (key = value lines)")->check(CLI::ExistingFile);
    app.add_flag("-q,--quiet", quiet, "No progress output");
    for (const auto& key : ExperimentConfig::keys()) {
      const ExperimentConfig defaults;
      app.add_option("--" + key, values[key], "default " + defaults.get(key))->group("Config keys");
    }
  }

  ExperimentConfig resolve(const CLI::App& app) const {
    ExperimentConfig cfg = file.empty() ? ExperimentConfig{} : ExperimentConfig::load(file);
    for (const auto& [key, value] : values) {
      if (app.count("--" + key) > 0) cfg.set(key, value);
    }
    cfg.validate();
    return cfg;
  }

  std::ostream* progress() const { return quiet ? nullptr : &std::cerr; }
};

fs::path run_root(const ExperimentConfig& cfg) { return fs::path(cfg.runs_dir) / cfg.fingerprint(); }

world::Split parse_split(const std::string& name) {
  if (name == "train") return world::Split::train;
  if (name == "val") return world::Split::val;
  if (name == "test") return world::Split::test;
  throw Error("unknown split '" + name + "' (train, val or test)");
}

std::vector<world::Example> pick(const harness::World& w, const std::string& split, std::size_t limit) {
  auto part = w.data.split(parse_split(split));
  if (limit != 0 && limit < part.size()) part = part.first(limit);
  return {part.begin(), part.end()};
}

json caption_json(const metrics::CaptionScore& s) {
  return {{"bleu1", s.bleu[0]}, {"bleu2", s.bleu[1]}, {"bleu3", s.bleu[2]}, {"bleu4", s.bleu[3]},
          {"cider_d", s.cider_d}};
}

void announce(const fs::path& path) { std::cout << path.string() << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Show, suggest and tell: suggestion diffusion and captioning on a synthetic world"};
  app.require_subcommand(1);

  ConfigFlags gen_flags, sugg_flags, cap_flags, caption_flags, eval_flags, recipe_flags, sweep_flags;

  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic dataset as JSON lines");
  std::string gen_out;
  gen->add_option("-o,--out", gen_out, "Output file (default <run.dir>/<fingerprint>/dataset.jsonl)");
  gen_flags.attach(*gen);

  auto* train_sugg = app.add_subcommand("train-suggester", "Train a suggestion model");
  std::string sugg_out;
  train_sugg->add_option("-o,--out", sugg_out, "Checkpoint path (default <run.dir>/<fingerprint>/suggester.ckpt)");
  sugg_flags.attach(*train_sugg);

  auto* train_cap = app.add_subcommand("train-captioner", "Train a captioner with the configured provider");
  std::string cap_out;
  train_cap->add_option("-o,--out", cap_out, "Checkpoint path (default <run.dir>/<fingerprint>/captioner.ckpt)");
  cap_flags.attach(*train_cap);

  auto* caption_cmd = app.add_subcommand("caption", "Caption scenes with a trained captioner");
  std::string caption_ckpt, caption_split = "test";
  std::size_t caption_limit = 10;
  caption_cmd->add_option("checkpoint", caption_ckpt, "Captioner checkpoint")->required();
  caption_cmd->add_option("--split", caption_split, "train, val or test");
  caption_cmd->add_option("--limit", caption_limit, "Number of scenes (0 = all)");
  caption_flags.attach(*caption_cmd);

  auto* eval = app.add_subcommand("eval", "Score trained checkpoints on a split");
  std::string eval_cap, eval_sugg, eval_split = "val";
  std::size_t eval_limit = 0;
  eval->add_option("--captioner", eval_cap, "Captioner checkpoint");
  eval->add_option("--suggester", eval_sugg, "Suggester checkpoint");
  eval->add_option("--split", eval_split, "train, val or test");
  eval->add_option("--limit", eval_limit, "Number of scenes (0 = all)");
  eval_flags.attach(*eval);

  auto* recipe = app.add_subcommand("recipe", "Run one experiment table");
  std::string recipe_name;
  std::size_t recipe_seeds = 3;
  recipe->add_option("name", recipe_name, "Table name")->required()->check(CLI::IsMember(harness::recipe_names()));
  recipe->add_option("--seeds", recipe_seeds, "Seeds per cell")->check(CLI::PositiveNumber);
  recipe_flags.attach(*recipe);

  auto* sweep = app.add_subcommand("oracle-sweep", "Captioner CIDEr-D against oracle suggestion quality");
  std::vector<double> rhos = {0.25, 0.5, 0.75, 1.0};
  std::size_t sweep_seeds = 3;
  sweep->add_option("--rho", rhos, "Oracle keep rates")->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--seeds", sweep_seeds, "Seeds per rho")->check(CLI::PositiveNumber);
  sweep_flags.attach(*sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto cfg = gen_flags.resolve(*gen);
      const auto data = world::generate_dataset(cfg.dataset_size, cfg.dataset_seed);
      const fs::path out = gen_out.empty() ? run_root(cfg) / "dataset.jsonl" : fs::path(gen_out);
      world::save_dataset(out, data);
      std::cerr << data.examples.size() << " scenes (train " << data.train_end << ", val "
                << data.val_end - data.train_end << ", test " << data.examples.size() - data.val_end << ")\n";
      announce(out);
    } else if (train_sugg->parsed()) {
      const auto cfg = sugg_flags.resolve(*train_sugg);
      harness::Runner runner(sugg_flags.progress());
      const auto cell = runner.suggester_cell(cfg);
      const fs::path out = sugg_out.empty() ? run_root(cfg) / "suggester.ckpt" : fs::path(sugg_out);
      harness::save_suggester(out, *runner.suggester(cfg).model, runner.world(cfg).units);
      write_file_atomic(run_root(cfg) / "suggester-report.json", cell.report + "\n");
      std::cerr << "val precision " << cell.metrics.at("precision") << " recall " << cell.metrics.at("recall")
                << " f1 " << cell.metrics.at("f1") << "\n";
      announce(out);
    } else if (train_cap->parsed()) {
      const auto cfg = cap_flags.resolve(*train_cap);
      harness::Runner runner(cap_flags.progress());
      const auto run = runner.captioner(cfg);
      const fs::path out = cap_out.empty() ? run_root(cfg) / "captioner.ckpt" : fs::path(cap_out);
      harness::save_captioner(out, *run.model, runner.world(cfg).words);
      write_file_atomic(run_root(cfg) / "captioner-report.json", run.cell.report + "\n");
      std::cerr << "val CIDEr-D " << run.cell.metrics.at("cider_d") << " BLEU-4 " << run.cell.metrics.at("bleu4")
                << "\n";
      announce(out);
    } else if (caption_cmd->parsed()) {
      const auto cfg = caption_flags.resolve(*caption_cmd);
      harness::Runner runner(caption_flags.progress());
      const auto& w = runner.world(cfg);
      world::Vocabulary words;
      const auto model = harness::load_captioner(caption_ckpt, &words);
      if (!(words == w.words)) throw Error("captioner vocabulary does not match the configured dataset");
      std::unique_ptr<caption::SuggestionProvider> owned;
      const auto* provider = model.config().integration == caption::Integration::none
                                 ? nullptr
                                 : runner.provider(cfg, owned);
      for (const auto& ex : pick(w, caption_split, caption_limit)) {
        const auto units = caption::provider_units(provider, ex, words, caption::kInferenceDraw);
        const auto h = caption::caption_scene(model, ex.grid, provider ? &units : nullptr, cfg.beam);
        std::cout << ex.index << "\t" << world::join_caption(words.decode(h.tokens)) << "\n";
      }
    } else if (eval->parsed()) {
      const auto cfg = eval_flags.resolve(*eval);
      if (eval_cap.empty() && eval_sugg.empty()) throw Error("eval: pass --captioner and/or --suggester");
      harness::Runner runner(eval_flags.progress());
      const auto& w = runner.world(cfg);
      const auto examples = pick(w, eval_split, eval_limit);
      json out = {{"config_fingerprint", cfg.fingerprint()}, {"split", eval_split}, {"scenes", examples.size()}};
      if (!eval_sugg.empty()) {
        world::Vocabulary units;
        const auto model = harness::load_suggester(eval_sugg, &units);
        if (!(units == w.units)) throw Error("suggester vocabulary does not match the configured dataset");
        const int steps = model.config().framework == suggest::Framework::direct ? 1 : cfg.sample_steps;
        const auto s = suggest::evaluate_suggester(model, examples, units, steps, cfg.content_only,
                                                   derive_seed(cfg.seed, 0x5A3));
        out["suggestion"] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
      }
      if (!eval_cap.empty()) {
        world::Vocabulary words;
        const auto model = harness::load_captioner(eval_cap, &words);
        if (!(words == w.words)) throw Error("captioner vocabulary does not match the configured dataset");
        std::unique_ptr<caption::SuggestionProvider> owned;
        const auto* provider = model.config().integration == caption::Integration::none
                                   ? nullptr
                                   : runner.provider(cfg, owned);
        const auto e = caption::evaluate_captioner(model, examples, provider, words, cfg.beam);
        out["caption"] = caption_json(e.scores);
        out["caption"]["val_xe"] = e.xe;
      }
      std::cout << out.dump(2) << "\n";
    } else if (recipe->parsed()) {
      const auto cfg = recipe_flags.resolve(*recipe);
      harness::RecipeOptions o;
      o.seeds = recipe_seeds;
      o.progress = recipe_flags.progress();
      const auto table = harness::run_recipe(recipe_name, cfg, o);
      std::cout << table.to_csv();
      announce(run_root(cfg) / (recipe_name + ".csv"));
    } else if (sweep->parsed()) {
      const auto cfg = sweep_flags.resolve(*sweep);
      harness::RecipeOptions o;
      o.seeds = sweep_seeds;
      o.progress = sweep_flags.progress();
      const auto result = harness::oracle_sweep(rhos, cfg, o);
      std::cout << result.to_json() << "\n";
      announce(run_root(cfg) / "oracle-sweep.json");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
