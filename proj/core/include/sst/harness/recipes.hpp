#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sst/harness/config.hpp"
#include "sst/harness/pipeline.hpp"
#include "sst/metrics/caption_metrics.hpp"

namespace sst::harness {

using MetricMap = std::map<std::string, double>;

struct SuggesterRun {
  std::unique_ptr<suggest::SuggesterModel> model;
  std::vector<suggest::SuggesterEpochLog> log;
  metrics::SuggestionScore val;
  std::unique_ptr<caption::CachedProvider> provider;
};

struct CellResult {
  std::string fingerprint;
  MetricMap metrics;
  std::string report;  // MetricsReport JSON
};

struct CaptionerRun {
  std::unique_ptr<caption::CaptionerModel> model;
  std::vector<caption::CaptionerEpochLog> log;
  CellResult cell;
};

// Trains and evaluates single table cells. Worlds and trained suggesters are
// cached by the config keys they depend on, so cells sharing a suggester
// train it once.
class Runner {
 public:
  explicit Runner(std::ostream* progress = nullptr) : progress_(progress) {}

  const World& world(const ExperimentConfig& cfg);
  const SuggesterRun& suggester(const ExperimentConfig& cfg);

  // Suggester-only cell: validation precision / recall / F1.
  CellResult suggester_cell(const ExperimentConfig& cfg);
  // Captioner cell with the configured provider: validation BLEU-1..4,
  // CIDEr-D, teacher-forced XE and the provider's suggestion P/R/F1.
  CellResult captioner_cell(const ExperimentConfig& cfg);
  // The same cell, keeping the trained model.
  CaptionerRun captioner(const ExperimentConfig& cfg);

  // Provider named by cfg.provider (null for "none"); `owned` keeps
  // providers that are not cached by the runner alive.
  const caption::SuggestionProvider* provider(const ExperimentConfig& cfg,
                                              std::unique_ptr<caption::SuggestionProvider>& owned);

 private:
  void note(const std::string& message) const;

  std::ostream* progress_;
  std::map<std::string, std::unique_ptr<World>> worlds_;
  std::map<std::string, SuggesterRun> suggesters_;
};

struct RecipeRow {
  std::string label;
  std::vector<MetricMap> seeds;

  MetricMap mean() const;
  MetricMap stdev() const;  // sample standard deviation; 0 for one seed
};

struct RecipeTable {
  std::string name;
  std::string fingerprint;  // of the base config
  std::vector<std::string> metrics;
  std::vector<RecipeRow> rows;

  // row,<metric>_mean,<metric>_std,... with exact ("%.17g") numbers.
  std::string to_csv() const;
};

struct RecipeOptions {
  std::size_t seeds = 3;
  bool write = true;  // CSV + per-cell reports under <runs_dir>/<fingerprint>/
  std::ostream* progress = nullptr;
};

const std::vector<std::string>& recipe_names();

// One row per configuration of the named table; throws for unknown names
// with the list of valid ones.
RecipeTable run_recipe(const std::string& name, const ExperimentConfig& base,
                       const RecipeOptions& options, Runner* runner = nullptr);

// Rank correlation with average ranks for ties; nullopt when either side is
// constant (or fewer than two points).
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct SweepResult {
  std::string fingerprint;
  std::vector<double> rhos;
  std::vector<std::vector<MetricMap>> cells;  // [rho][seed]
  std::vector<double> mean_cider;
  std::optional<double> correlation;

  std::string to_json() const;
};

SweepResult oracle_sweep(std::span<const double> rhos, const ExperimentConfig& base,
                         const RecipeOptions& options, Runner* runner = nullptr);

}  // namespace sst::harness
