#include "sst/harness/config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <sstream>
#include <type_traits>

#include "sst/caption/model.hpp"
#include "sst/error.hpp"
#include "sst/io.hpp"
#include "sst/suggest/diffusion.hpp"

namespace sst::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error("config: bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error("config: bad boolean '" + std::string(text) + "' for " + std::string(key));
}

struct Field {
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

template <typename T>
Field number(T ExperimentConfig::*member, const char* key) {
  return {[member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          },
          [member, key](ExperimentConfig& c, std::string_view v) {
            c.*member = parse_number<T>(key, v);
          }};
}

Field flag(bool ExperimentConfig::*member, const char* key) {
  return {[member](const ExperimentConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [member, key](ExperimentConfig& c, std::string_view v) { c.*member = parse_bool(key, v); }};
}

Field text(std::string ExperimentConfig::*member) {
  return {[member](const ExperimentConfig& c) { return c.*member; },
          [member](ExperimentConfig& c, std::string_view v) { c.*member = std::string(v); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  using C = ExperimentConfig;
  static const std::map<std::string, Field, std::less<>> table = {
      {"dataset.size", number(&C::dataset_size, "dataset.size")},
      {"dataset.seed", number(&C::dataset_seed, "dataset.seed")},
      {"dataset.min_freq", number(&C::min_freq, "dataset.min_freq")},
      {"suggester.framework", text(&C::framework)},
      {"suggester.refs", number(&C::refs, "suggester.refs")},
      {"suggester.content_only", flag(&C::content_only, "suggester.content_only")},
      {"suggester.a1h", flag(&C::a1h, "suggester.a1h")},
      {"suggester.ngram", number(&C::ngram, "suggester.ngram")},
      {"suggester.hidden", number(&C::sugg_hidden, "suggester.hidden")},
      {"suggester.layers", number(&C::sugg_layers, "suggester.layers")},
      {"suggester.heads", number(&C::sugg_heads, "suggester.heads")},
      {"suggester.ff", number(&C::sugg_ff, "suggester.ff")},
      {"suggester.diffusion_steps", number(&C::diffusion_steps, "suggester.diffusion_steps")},
      {"suggester.sample_steps", number(&C::sample_steps, "suggester.sample_steps")},
      {"suggester.epochs", number(&C::sugg_epochs, "suggester.epochs")},
      {"suggester.length_penalty", flag(&C::length_penalty, "suggester.length_penalty")},
      {"suggester.share_length_encoder", flag(&C::share_length_encoder, "suggester.share_length_encoder")},
      {"suggester.shuffle_set_order", flag(&C::shuffle_set_order, "suggester.shuffle_set_order")},
      {"captioner.integration", text(&C::integration)},
      {"captioner.hidden", number(&C::cap_hidden, "captioner.hidden")},
      {"captioner.layers", number(&C::cap_layers, "captioner.layers")},
      {"captioner.heads", number(&C::cap_heads, "captioner.heads")},
      {"captioner.ff", number(&C::cap_ff, "captioner.ff")},
      {"captioner.sugg_dropout", number(&C::sugg_dropout, "captioner.sugg_dropout")},
      {"captioner.epochs", number(&C::cap_epochs, "captioner.epochs")},
      {"captioner.beam", number(&C::beam, "captioner.beam")},
      {"captioner.share_reduce_weight", flag(&C::share_reduce_weight, "captioner.share_reduce_weight")},
      {"provider", text(&C::provider)},
      {"optim.lr", number(&C::lr, "optim.lr")},
      {"optim.warmup", number(&C::warmup, "optim.warmup")},
      {"optim.batch", number(&C::batch, "optim.batch")},
      {"seed", number(&C::seed, "seed")},
      {"run.max_train", number(&C::max_train, "run.max_train")},
      {"run.max_val", number(&C::max_val, "run.max_val")},
      {"run.dir", text(&C::runs_dir)},
  };
  return table;
}

const Field& field(std::string_view key) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw Error("config: unknown key '" + std::string(key) + "'");
  return it->second;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, f] : fields()) out.push_back(k);
    return out;
  }();
  return names;
}

std::string ExperimentConfig::get(std::string_view key) const { return field(key).get(*this); }

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  field(key).set(*this, trim(value));
}

std::map<std::string, std::string> ExperimentConfig::as_map() const {
  std::map<std::string, std::string> out;
  for (const auto& [k, f] : fields()) out[k] = f.get(*this);
  return out;
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  for (const auto& [k, f] : fields()) {
    if (k == "run.dir") continue;
    out += k + "=" + f.get(*this) + "\n";
  }
  return out;
}

std::string ExperimentConfig::fingerprint() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
  return buf;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    cfg.set(trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

void ExperimentConfig::validate() const {
  if (dataset_size < 1) throw Error("config: dataset.size must be >= 1");
  if (refs != 1 && refs != 5) throw Error("config: suggester.refs must be 1 or 5");
  if (ngram < 1 || ngram > 3) throw Error("config: suggester.ngram must be 1, 2 or 3");
  suggest::parse_framework(framework);
  caption::parse_integration(integration);
  if (diffusion_steps < 1) throw Error("config: suggester.diffusion_steps must be >= 1");
  if (sample_steps < 1 || sample_steps > diffusion_steps) {
    throw Error("config: suggester.sample_steps must lie in [1, diffusion_steps]");
  }
  if (!(sugg_dropout >= 0.0 && sugg_dropout <= 1.0)) {
    throw Error("config: captioner.sugg_dropout must lie in [0, 1]");
  }
  if (beam < 1) throw Error("config: captioner.beam must be >= 1");
  if (batch < 1) throw Error("config: optim.batch must be >= 1");
  if (!(lr > 0.0)) throw Error("config: optim.lr must be positive");
  if (provider != "none" && provider != "suggester" && provider.rfind("suggester:", 0) != 0 &&
      provider.rfind("oracle:", 0) != 0) {
    throw Error("config: provider must be none, suggester, suggester:<ckpt> or oracle:<rho>");
  }
}

}  // namespace sst::harness
