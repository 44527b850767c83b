#include "sst/harness/recipes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "sst/error.hpp"
#include "sst/io.hpp"
#include "sst/oracle/oracle.hpp"

namespace sst::harness {

using nlohmann::json;

namespace {

// Keys a trained suggester depends on: everything except the captioner and
// provider settings.
std::string suggester_key(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  const ExperimentConfig defaults;
  c.integration = defaults.integration;
  c.cap_hidden = defaults.cap_hidden;
  c.cap_layers = defaults.cap_layers;
  c.cap_heads = defaults.cap_heads;
  c.cap_ff = defaults.cap_ff;
  c.sugg_dropout = defaults.sugg_dropout;
  c.cap_epochs = defaults.cap_epochs;
  c.beam = defaults.beam;
  c.share_reduce_weight = defaults.share_reduce_weight;
  c.provider = defaults.provider;
  return c.canonical();
}

std::string world_key(const ExperimentConfig& cfg) {
  return std::to_string(cfg.dataset_size) + "/" + std::to_string(cfg.dataset_seed) + "/" +
         std::to_string(cfg.min_freq) + "/" + std::to_string(cfg.ngram);
}

json score_json(const metrics::SuggestionScore& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

json suggester_curve(const std::vector<suggest::SuggesterEpochLog>& log) {
  json out = json::array();
  for (const auto& e : log) {
    out.push_back({{"epoch", e.epoch},
                   {"loss", e.loss},
                   {"elbo", e.elbo},
                   {"length_loss", e.length},
                   {"length_accuracy", e.length_accuracy},
                   {"val", score_json(e.val)}});
  }
  return out;
}

json captioner_curve(const std::vector<caption::CaptionerEpochLog>& log) {
  json out = json::array();
  for (const auto& e : log) {
    json row = {{"epoch", e.epoch},
                {"loss", e.loss},
                {"token_accuracy", e.token_accuracy},
                {"dropped_fraction", e.dropped_fraction},
                {"val_loss", e.val_loss}};
    if (e.has_scores) row["val_cider_d"] = e.val.cider_d;
    out.push_back(row);
  }
  return out;
}

json base_report(const ExperimentConfig& cfg, double seconds) {
  return {{"config_fingerprint", cfg.fingerprint()},
          {"code_version", code_version()},
          {"seed", cfg.seed},
          {"wall_time_s", seconds},
          {"config", cfg.as_map()}};
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double parse_rho(const std::string& provider) {
  const std::string text = provider.substr(provider.find(':') + 1);
  try {
    std::size_t used = 0;
    const double rho = std::stod(text, &used);
    if (used != text.size()) throw Error("");
    return rho;
  } catch (const std::exception&) {
    throw Error("bad oracle provider '" + provider + "' (expected oracle:<rho>)");
  }
}

std::string slug(const std::string& label) {
  std::string out;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != '-') {
      out += '-';
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

}  // namespace

void Runner::note(const std::string& message) const {
  if (progress_ != nullptr) *progress_ << message << std::endl;
}

const World& Runner::world(const ExperimentConfig& cfg) {
  auto& slot = worlds_[world_key(cfg)];
  if (!slot) slot = std::make_unique<World>(build_world(cfg));
  return *slot;
}

const SuggesterRun& Runner::suggester(const ExperimentConfig& cfg) {
  const std::string key = suggester_key(cfg);
  if (const auto it = suggesters_.find(key); it != suggesters_.end()) return it->second;
  const World& w = world(cfg);
  note("training suggester (" + cfg.framework + ", refs " + std::to_string(cfg.refs) +
       (cfg.content_only ? ", content-only" : "") + (cfg.a1h ? ", a1h" : "") + ", ngram " +
       std::to_string(cfg.ngram) + ", seed " + std::to_string(cfg.seed) + ")");
  auto trained = suggest::train_suggester(suggester_config(cfg, w.units.size()), w.data, w.units,
                                          suggester_options(cfg));
  SuggesterRun run;
  run.model = std::make_unique<suggest::SuggesterModel>(std::move(trained.model));
  run.log = std::move(trained.log);
  if (!run.log.empty()) run.val = run.log.back().val;
  run.provider = suggester_provider(*run.model, w, cfg);
  return suggesters_.emplace(key, std::move(run)).first->second;
}

CellResult Runner::suggester_cell(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const SuggesterRun& run = suggester(cfg);
  CellResult out;
  out.fingerprint = cfg.fingerprint();
  out.metrics = {{"precision", run.val.precision}, {"recall", run.val.recall}, {"f1", run.val.f1}};
  json report = base_report(cfg, elapsed(start));
  report["suggestion"] = score_json(run.val);
  report["parameters"] = run.model->parameters().scalar_count();
  report["loss_curves"] = {{"suggester", suggester_curve(run.log)}};
  out.report = report.dump(2);
  return out;
}

const caption::SuggestionProvider* Runner::provider(const ExperimentConfig& cfg,
                                                    std::unique_ptr<caption::SuggestionProvider>& owned) {
  const World& w = world(cfg);
  if (cfg.provider == "none") return nullptr;
  if (cfg.provider == "suggester") return suggester(cfg).provider.get();
  if (cfg.provider.rfind("suggester:", 0) == 0) {
    world::Vocabulary units;
    const auto model = load_suggester(cfg.provider.substr(10), &units);
    if (!(units == w.units)) throw Error("suggester checkpoint vocabulary does not match the dataset");
    // Working scenes plus the test split, so the CLI can caption either.
    auto scenes = working_examples(w, cfg);
    const auto test = w.data.split(world::Split::test);
    scenes.insert(scenes.end(), test.begin(), test.end());
    owned = suggester_provider(model, w, cfg, scenes);
    return owned.get();
  }
  if (cfg.provider.rfind("oracle:", 0) == 0) {
    owned = std::make_unique<oracle::OracleProvider>(w.units, parse_rho(cfg.provider),
                                                     derive_seed(cfg.seed, 0x0AC));
    return owned.get();
  }
  throw Error("unknown provider '" + cfg.provider + "'");
}

CellResult Runner::captioner_cell(const ExperimentConfig& cfg) { return captioner(cfg).cell; }

CaptionerRun Runner::captioner(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const World& w = world(cfg);
  std::unique_ptr<caption::SuggestionProvider> owned;
  const caption::SuggestionProvider* provider = this->provider(cfg, owned);
  const SuggesterRun* sugg = cfg.provider == "suggester" ? &suggester(cfg) : nullptr;
  note("training captioner (" + cfg.integration + ", provider " + cfg.provider + ", seed " +
       std::to_string(cfg.seed) + ")");
  auto trained = caption::train_captioner(captioner_config(cfg, w.words.size()), w.data, w.words,
                                          provider, captioner_options(cfg));
  const auto& last = trained.log.back();
  CellResult out;
  out.fingerprint = cfg.fingerprint();
  out.metrics = {{"bleu1", last.val.bleu[0]}, {"bleu2", last.val.bleu[1]},
                 {"bleu3", last.val.bleu[2]}, {"bleu4", last.val.bleu[3]},
                 {"cider_d", last.val.cider_d}, {"val_xe", last.val_loss}};
  json report = base_report(cfg, 0.0);
  if (provider != nullptr) {
    auto val = w.data.split(world::Split::val);
    if (cfg.max_val != 0 && cfg.max_val < val.size()) val = val.first(cfg.max_val);
    metrics::SuggestionScorer scorer;
    for (const auto& ex : val) {
      scorer.add(provider->suggest(ex, caption::kInferenceDraw),
                 suggest::scoring_reference(ex, provider->vocabulary(), false));
    }
    const auto s = scorer.score();
    out.metrics["sugg_precision"] = s.precision;
    out.metrics["sugg_recall"] = s.recall;
    out.metrics["sugg_f1"] = s.f1;
    report["suggestion"] = score_json(s);
  }
  report["caption"] = {{"bleu1", last.val.bleu[0]}, {"bleu2", last.val.bleu[1]},
                       {"bleu3", last.val.bleu[2]}, {"bleu4", last.val.bleu[3]},
                       {"cider_d", last.val.cider_d}, {"val_xe", last.val_loss}};
  json curves = {{"captioner", captioner_curve(trained.log)}};
  if (sugg != nullptr) curves["suggester"] = suggester_curve(sugg->log);
  report["loss_curves"] = curves;
  report["provider"] = provider != nullptr ? provider->describe() : "none";
  report["wall_time_s"] = elapsed(start);
  out.report = report.dump(2);
  CaptionerRun run;
  run.model = std::make_unique<caption::CaptionerModel>(std::move(trained.model));
  run.log = std::move(trained.log);
  run.cell = std::move(out);
  return run;
}

MetricMap RecipeRow::mean() const {
  MetricMap out;
  for (const auto& s : seeds) {
    for (const auto& [k, v] : s) out[k] += v;
  }
  for (auto& [k, v] : out) v /= static_cast<double>(seeds.size());
  return out;
}

MetricMap RecipeRow::stdev() const {
  const MetricMap m = mean();
  MetricMap out;
  for (const auto& [k, mu] : m) {
    double ss = 0.0;
    std::size_t n = 0;
    for (const auto& s : seeds) {
      if (const auto it = s.find(k); it != s.end()) {
        ss += (it->second - mu) * (it->second - mu);
        ++n;
      }
    }
    out[k] = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  }
  return out;
}

std::string RecipeTable::to_csv() const {
  std::string out = "row,seeds";
  for (const auto& m : metrics) out += "," + m + "_mean," + m + "_std";
  out += "\n";
  for (const auto& row : rows) {
    const MetricMap mu = row.mean();
    const MetricMap sd = row.stdev();
    out += row.label + "," + std::to_string(row.seeds.size());
    for (const auto& m : metrics) {
      if (const auto it = mu.find(m); it != mu.end()) {
        out += "," + format_double(it->second) + "," + format_double(sd.at(m));
      } else {
        out += ",,";
      }
    }
    out += "\n";
  }
  return out;
}

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names = {
      "table-suggester-ablation", "table-sst-ablation", "table-integration",
      "table-frameworks",         "table-ngrams",       "table-oracle"};
  return names;
}

namespace {

enum class CellKind { suggester, captioner };

struct RowSpec {
  std::string label;
  std::function<void(ExperimentConfig&)> apply;
};

struct RecipeSpec {
  CellKind kind;
  std::vector<std::string> metrics;
  std::vector<RowSpec> rows;
};

void refs(ExperimentConfig& c, int r) { c.refs = r; }

RecipeSpec recipe_spec(const std::string& name) {
  const std::vector<std::string> sugg = {"precision", "recall", "f1"};
  const std::vector<std::string> caps = {"bleu1", "bleu2", "bleu3",        "bleu4",       "cider_d",
                                         "val_xe", "sugg_precision", "sugg_recall", "sugg_f1"};
  auto with_suggester = [](ExperimentConfig& c) {
    c.provider = "suggester";
    c.integration = "D";
  };
  auto baseline = [](ExperimentConfig& c) {
    c.provider = "none";
    c.integration = "none";
  };
  if (name == "table-suggester-ablation") {
    auto wide = [](ExperimentConfig& c) {
      c.sugg_hidden *= 4;
      c.sugg_ff *= 4;
    };
    return {CellKind::suggester, sugg,
            {{"a wide 1-ref all-words", [=](auto& c) { wide(c); refs(c, 1); }},
             {"b wide 5-ref all-words", [=](auto& c) { wide(c); refs(c, 5); }},
             {"c 1-ref all-words", [](auto& c) { refs(c, 1); }},
             {"d 5-ref all-words", [](auto& c) { refs(c, 5); }},
             {"e 1-ref content-only", [](auto& c) { refs(c, 1); c.content_only = true; }},
             {"f 5-ref content-only", [](auto& c) { refs(c, 5); c.content_only = true; }},
             {"g 1-ref a1h", [](auto& c) { refs(c, 1); c.a1h = true; }},
             {"h 5-ref a1h", [](auto& c) { refs(c, 5); c.a1h = true; }}}};
  }
  if (name == "table-sst-ablation") {
    return {CellKind::captioner, caps,
            {{"baseline", baseline},
             {"with c", [=](auto& c) { with_suggester(c); refs(c, 1); }},
             {"with d", [=](auto& c) { with_suggester(c); refs(c, 5); }},
             {"with g", [=](auto& c) { with_suggester(c); refs(c, 1); c.a1h = true; }},
             {"with h", [=](auto& c) { with_suggester(c); refs(c, 5); c.a1h = true; }}}};
  }
  if (name == "table-integration") {
    std::vector<RowSpec> rows = {{"baseline", baseline}};
    for (const char* v : {"A", "B", "C", "D"}) {
      rows.push_back({v, [=](auto& c) { with_suggester(c); c.integration = v; }});
    }
    return {CellKind::captioner, caps, rows};
  }
  if (name == "table-frameworks") {
    return {CellKind::suggester, sugg,
            {{"direct", [](auto& c) { c.framework = "direct"; }},
             {"absorbing", [](auto& c) { c.framework = "absorbing"; }},
             {"reparam", [](auto& c) { c.framework = "reparam"; }},
             {"analog-bit", [](auto& c) { c.framework = "analog-bit"; c.length_penalty = false; }},
             {"analog-bit+LP", [](auto& c) { c.framework = "analog-bit"; c.length_penalty = true; }}}};
  }
  if (name == "table-ngrams") {
    std::vector<RowSpec> rows = {{"baseline", baseline}};
    for (int n = 1; n <= 3; ++n) {
      for (int r : {1, 5}) {
        rows.push_back({"ngram " + std::to_string(n) + " " + std::to_string(r) + "-ref",
                        [=](auto& c) { with_suggester(c); c.ngram = n; refs(c, r); }});
      }
    }
    return {CellKind::captioner, caps, rows};
  }
  if (name == "table-oracle") {
    std::vector<RowSpec> rows = {{"ours", with_suggester}};
    for (const char* rho : {"0.25", "0.5", "0.75", "1"}) {
      rows.push_back({std::string("oracle rho=") + rho, [=](auto& c) {
                        c.provider = std::string("oracle:") + rho;
                        c.integration = "D";
                      }});
    }
    return {CellKind::captioner, caps, rows};
  }
  std::string valid;
  for (const auto& n : recipe_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw Error("unknown recipe '" + name + "'; valid recipes: " + valid);
}

std::filesystem::path run_dir(const ExperimentConfig& base) {
  return std::filesystem::path(base.runs_dir) / base.fingerprint();
}

}  // namespace

RecipeTable run_recipe(const std::string& name, const ExperimentConfig& base,
                       const RecipeOptions& options, Runner* runner) {
  const RecipeSpec spec = recipe_spec(name);
  base.validate();
  if (options.seeds < 1) throw Error("run_recipe: at least one seed is required");
  Runner local(options.progress);
  Runner& r = runner != nullptr ? *runner : local;

  RecipeTable table;
  table.name = name;
  table.fingerprint = base.fingerprint();
  table.metrics = spec.metrics;
  const auto dir = run_dir(base) / name;
  for (const auto& row : spec.rows) {
    RecipeRow out{row.label, {}};
    for (std::size_t s = 0; s < options.seeds; ++s) {
      ExperimentConfig cfg = base;
      row.apply(cfg);
      cfg.seed = base.seed + s;
      cfg.validate();
      const CellResult cell =
          spec.kind == CellKind::suggester ? r.suggester_cell(cfg) : r.captioner_cell(cfg);
      out.seeds.push_back(cell.metrics);
      if (options.write) {
        write_file_atomic(dir / (slug(row.label) + "-seed" + std::to_string(cfg.seed) + ".json"),
                          cell.report + "\n");
      }
    }
    table.rows.push_back(std::move(out));
  }
  if (options.write) write_file_atomic(run_dir(base) / (name + ".csv"), table.to_csv());
  return table;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("spearman: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  auto ranks = [n](std::span<const double> v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::string SweepResult::to_json() const {
  json cells_json = json::array();
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    cells_json.push_back({{"rho", rhos[i]}, {"mean_cider_d", mean_cider[i]}, {"seeds", cells[i]}});
  }
  return json{{"config_fingerprint", fingerprint},
              {"code_version", code_version()},
              {"cells", cells_json},
              {"spearman_rho_cider_d", correlation ? json(*correlation) : json(nullptr)}}
      .dump(2);
}

SweepResult oracle_sweep(std::span<const double> rhos, const ExperimentConfig& base,
                         const RecipeOptions& options, Runner* runner) {
  base.validate();
  if (options.seeds < 1) throw Error("oracle_sweep: at least one seed is required");
  Runner local(options.progress);
  Runner& r = runner != nullptr ? *runner : local;
  SweepResult out;
  out.fingerprint = base.fingerprint();
  out.rhos.assign(rhos.begin(), rhos.end());
  for (double rho : rhos) {
    std::vector<MetricMap> seeds;
    double sum = 0.0;
    for (std::size_t s = 0; s < options.seeds; ++s) {
      ExperimentConfig cfg = base;
      cfg.provider = "oracle:" + format_double(rho);
      cfg.integration = "D";
      cfg.seed = base.seed + s;
      const CellResult cell = r.captioner_cell(cfg);
      sum += cell.metrics.at("cider_d");
      seeds.push_back(cell.metrics);
      if (options.write) {
        write_file_atomic(run_dir(base) / "oracle-sweep" /
                              ("rho-" + format_double(rho) + "-seed" + std::to_string(cfg.seed) + ".json"),
                          cell.report + "\n");
      }
    }
    out.cells.push_back(std::move(seeds));
    out.mean_cider.push_back(sum / static_cast<double>(options.seeds));
  }
  out.correlation = spearman(out.rhos, out.mean_cider);
  if (options.write) write_file_atomic(run_dir(base) / "oracle-sweep.json", out.to_json() + "\n");
  return out;
}

}  // namespace sst::harness
