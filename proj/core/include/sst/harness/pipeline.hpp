#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sst/caption/provider.hpp"
#include "sst/caption/trainer.hpp"
#include "sst/harness/config.hpp"
#include "sst/metrics/suggestion_score.hpp"
#include "sst/suggest/trainer.hpp"
#include "sst/world/dataset.hpp"
#include "sst/world/vocabulary.hpp"

namespace sst::harness {

const char* code_version();

// Dataset plus the captioner word vocabulary and the suggestion unit
// vocabulary (the same as `words` for single-word units).
struct World {
  world::Dataset data;
  world::Vocabulary words;
  world::Vocabulary units;
};

World build_world(const ExperimentConfig& cfg);

suggest::SuggesterConfig suggester_config(const ExperimentConfig& cfg, std::size_t vocab_size);
suggest::SuggesterTrainOptions suggester_options(const ExperimentConfig& cfg);
caption::CaptionerConfig captioner_config(const ExperimentConfig& cfg, std::size_t vocab_size);
caption::CaptionerTrainOptions captioner_options(const ExperimentConfig& cfg);

// Scenes a run touches: the (capped) training and validation splits.
std::vector<world::Example> working_examples(const World& w, const ExperimentConfig& cfg);

// Suggestions of a frozen suggester for every working scene.
std::unique_ptr<caption::CachedProvider> suggester_provider(const suggest::SuggesterModel& model,
                                                            const World& w,
                                                            const ExperimentConfig& cfg);
// Same, for an explicit list of scenes.
std::unique_ptr<caption::CachedProvider> suggester_provider(const suggest::SuggesterModel& model,
                                                            const World& w,
                                                            const ExperimentConfig& cfg,
                                                            std::span<const world::Example> examples);

// Checkpoint + JSON sidecar (<path>.json) holding the config and vocabulary.
void save_suggester(const std::filesystem::path& path, const suggest::SuggesterModel& model,
                    const world::Vocabulary& units);
suggest::SuggesterModel load_suggester(const std::filesystem::path& path,
                                       world::Vocabulary* units = nullptr);
void save_captioner(const std::filesystem::path& path, const caption::CaptionerModel& model,
                    const world::Vocabulary& words);
caption::CaptionerModel load_captioner(const std::filesystem::path& path,
                                       world::Vocabulary* words = nullptr);

}  // namespace sst::harness
