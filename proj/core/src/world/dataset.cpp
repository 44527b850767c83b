#include "sst/world/dataset.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sst/error.hpp"
#include "sst/io.hpp"
#include "sst/rng.hpp"

namespace sst::world {
namespace {

void assign_splits(Dataset& d) {
  const std::size_t n = d.examples.size();
  d.train_end = n * 90 / 100;
  d.val_end = d.train_end + n * 5 / 100;
}

}  // namespace

std::span<const Example> Dataset::split(Split which) const {
  std::span<const Example> all(examples);
  switch (which) {
    case Split::train:
      return all.subspan(0, train_end);
    case Split::val:
      return all.subspan(train_end, val_end - train_end);
    case Split::test:
      return all.subspan(val_end);
  }
  return {};
}

std::vector<Caption> Dataset::training_captions() const {
  std::vector<Caption> out;
  for (const auto& ex : split(Split::train)) {
    out.insert(out.end(), ex.refs.captions.begin(), ex.refs.captions.end());
  }
  return out;
}

Dataset generate_dataset(std::size_t count, std::uint64_t master_seed) {
  if (count == 0) throw Error("generate_dataset: count must be >= 1");
  Dataset d;
  d.master_seed = master_seed;
  d.examples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Example ex;
    ex.index = i;
    ex.scene = sample_scene(derive_seed(master_seed, i));
    ex.grid = feature_grid(ex.scene);
    ex.refs = describe_scene(ex.scene);
    d.examples.push_back(std::move(ex));
  }
  assign_splits(d);
  return d;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ostringstream os;
  for (const auto& ex : dataset.examples) {
    nlohmann::json j;
    j["scene_seed"] = ex.scene.seed;
    auto& objs = j["objects"] = nlohmann::json::array();
    for (const auto& o : ex.scene.objects) {
      objs.push_back({{"object", o.object}, {"color", o.color}, {"action", o.action}, {"cell", o.cell}});
    }
    auto& caps = j["captions"] = nlohmann::json::array();
    for (const auto& c : ex.refs.captions) caps.push_back(join_caption(c));
    os << j.dump() << '\n';
  }
  write_file_atomic(path, os.str());
}

Dataset load_dataset(const std::filesystem::path& path, std::uint64_t master_seed) {
  std::istringstream in(read_file(path));
  Dataset d;
  d.master_seed = master_seed;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    Example ex;
    ex.index = d.examples.size();
    ex.scene.seed = j.at("scene_seed").get<std::uint64_t>();
    for (const auto& o : j.at("objects")) {
      ex.scene.objects.push_back({o.at("object").get<int>(), o.at("color").get<int>(),
                                  o.at("action").get<int>(), o.at("cell").get<int>()});
    }
    const auto& caps = j.at("captions");
    if (caps.size() != static_cast<std::size_t>(kRefsPerScene)) {
      throw Error("dataset record needs exactly 5 captions");
    }
    for (std::size_t r = 0; r < caps.size(); ++r) ex.refs.captions[r] = tokenize(caps[r].get<std::string>());
    ex.grid = feature_grid(ex.scene);
    d.examples.push_back(std::move(ex));
  }
  if (d.examples.empty()) throw Error("dataset file is empty: " + path.string());
  assign_splits(d);
  return d;
}

}  // namespace sst::world
