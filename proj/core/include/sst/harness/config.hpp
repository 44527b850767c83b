#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sst::harness {

// Every knob of an experiment. The text form is one `key = value` per line;
// '#' starts a comment. Keys are listed by ExperimentConfig::keys().
struct ExperimentConfig {
  // dataset
  std::size_t dataset_size = 2000;
  std::uint64_t dataset_seed = 0;
  int min_freq = 5;
  // suggester
  std::string framework = "reparam";
  int refs = 5;
  bool content_only = false;
  bool a1h = false;
  int ngram = 1;
  std::size_t sugg_hidden = 128;
  std::size_t sugg_layers = 3;
  std::size_t sugg_heads = 4;
  std::size_t sugg_ff = 256;
  int diffusion_steps = 20;
  int sample_steps = 20;
  std::size_t sugg_epochs = 20;
  bool length_penalty = false;
  bool share_length_encoder = false;
  bool shuffle_set_order = false;
  // captioner
  std::string integration = "D";
  std::size_t cap_hidden = 64;
  std::size_t cap_layers = 3;
  std::size_t cap_heads = 4;
  std::size_t cap_ff = 128;
  double sugg_dropout = 0.5;
  std::size_t cap_epochs = 20;
  std::size_t beam = 3;
  bool share_reduce_weight = false;
  // none | suggester | suggester:<checkpoint> | oracle:<rho>
  std::string provider = "suggester";
  // optimizer
  double lr = 3e-4;
  std::size_t warmup = 200;
  std::size_t batch = 16;
  // run
  std::uint64_t seed = 0;
  std::size_t max_train = 0;  // 0 = whole split
  std::size_t max_val = 0;
  std::string runs_dir = "runs";  // output location; not part of the fingerprint

  static const std::vector<std::string>& keys();

  std::string get(std::string_view key) const;
  // Throws for unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);

  // Canonical `key=value` lines in key order, excluding runs_dir.
  std::string canonical() const;
  std::map<std::string, std::string> as_map() const;
  // 16 hex digits of the 64-bit FNV-1a hash of canonical().
  std::string fingerprint() const;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);
  // Validates cross-field constraints; throws sst::Error.
  void validate() const;
};

std::uint64_t fnv1a(std::string_view text);

// Exact, round-trippable text for a double ("%.17g").
std::string format_double(double v);

}  // namespace sst::harness
