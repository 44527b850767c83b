#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sst/autodiff/tensor.hpp"
#include "sst/world/scene.hpp"

namespace sst::world {

struct Example {
  std::size_t index = 0;
  Scene scene;
  Tensor grid;
  ReferenceSet refs;
};

enum class Split { train, val, test };

struct Dataset {
  std::uint64_t master_seed = 0;
  std::vector<Example> examples;
  // Scene-index ranges: [0, train_end), [train_end, val_end), [val_end, size).
  std::size_t train_end = 0;
  std::size_t val_end = 0;

  std::span<const Example> split(Split which) const;
  std::vector<Caption> training_captions() const;
};

// Scene i is drawn from derive_seed(master_seed, i); split is 90/5/5 by index.
Dataset generate_dataset(std::size_t count, std::uint64_t master_seed);

// JSON-lines cache, one record {scene_seed, objects, captions} per scene.
// Feature grids are recomputed on load.
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path, std::uint64_t master_seed = 0);

}  // namespace sst::world
