#include "sst/suggest/diffusion.hpp"

#include <cmath>

#include "sst/error.hpp"

namespace sst::suggest {

Framework parse_framework(std::string_view name) {
  if (name == "direct") return Framework::direct;
  if (name == "absorbing") return Framework::absorbing;
  if (name == "reparam" || name == "reparametrized") return Framework::reparametrized;
  if (name == "analog-bit" || name == "analog_bit") return Framework::analog_bit;
  throw Error("unknown framework '" + std::string(name) +
              "' (expected direct|absorbing|reparam|analog-bit)");
}

std::string_view framework_name(Framework f) {
  switch (f) {
    case Framework::direct:
      return "direct";
    case Framework::absorbing:
      return "absorbing";
    case Framework::reparametrized:
      return "reparam";
    case Framework::analog_bit:
      return "analog-bit";
  }
  return "?";
}

bool is_discrete(Framework f) { return f != Framework::analog_bit; }

Schedule::Schedule(int steps) : steps_(steps) {
  if (steps < 1) throw Error("schedule needs at least one diffusion step");
}

double Schedule::alpha(int t) const {
  if (t < 0 || t > steps_) {
    throw Error("diffusion step " + std::to_string(t) + " outside [0, " + std::to_string(steps_) + "]");
  }
  return 1.0 - static_cast<double>(t) / static_cast<double>(steps_);
}

std::size_t codeword_width(std::size_t vocab_size) {
  std::size_t w = 1;
  while ((std::size_t{1} << w) < vocab_size) ++w;
  return w;
}

std::vector<double> codeword(int id, std::size_t width) {
  std::vector<double> out(width);
  for (std::size_t b = 0; b < width; ++b) out[b] = ((id >> b) & 1) != 0 ? 1.0 : -1.0;
  return out;
}

Tensor encode_bits(std::span<const int> ids, std::size_t width) {
  Tensor out = Tensor::matrix(ids.size(), width);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto code = codeword(ids[i], width);
    for (std::size_t b = 0; b < width; ++b) out(i, b) = code[b];
  }
  return out;
}

NoisyState forward_corrupt(std::span<const int> x0, int t, const Schedule& schedule,
                           Framework framework, int mask_id, std::size_t vocab_size, Rng& rng) {
  const double alpha = schedule.alpha(t);
  NoisyState state;
  state.t = t;
  if (is_discrete(framework)) {
    state.tokens.assign(x0.begin(), x0.end());
    for (int& tok : state.tokens) {
      if (!rng.bernoulli(alpha)) tok = mask_id;
    }
    return state;
  }
  state.bits = encode_bits(x0, codeword_width(vocab_size));
  const double keep = std::sqrt(alpha);
  const double noise = std::sqrt(1.0 - alpha);
  for (double& v : state.bits.values()) v = keep * v + noise * rng.normal();
  return state;
}

}  // namespace sst::suggest
