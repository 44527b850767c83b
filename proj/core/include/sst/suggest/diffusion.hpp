#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sst/autodiff/tensor.hpp"
#include "sst/rng.hpp"

namespace sst::suggest {

enum class Framework { direct, absorbing, reparametrized, analog_bit };

Framework parse_framework(std::string_view name);  // direct|absorbing|reparam|analog-bit
std::string_view framework_name(Framework f);
bool is_discrete(Framework f);

// Linear keep-rate schedule alpha_t = 1 - t / steps, t in [0, steps].
class Schedule {
 public:
  explicit Schedule(int steps = 20);
  int steps() const { return steps_; }
  double alpha(int t) const;

 private:
  int steps_;
};

// Partially corrupted sequence. Discrete frameworks use `tokens` (MASK marks an
// absorbed position); analog-bit uses `bits` ([length x width] reals).
struct NoisyState {
  std::vector<int> tokens;
  Tensor bits;
  int t = 0;

  std::size_t length() const { return tokens.empty() ? bits.rows() : tokens.size(); }
};

// Bit width ceil(log2(vocab_size)), at least 1.
std::size_t codeword_width(std::size_t vocab_size);
// {-1,+1} codeword of `id`, least significant bit first.
std::vector<double> codeword(int id, std::size_t width);
// Codewords for a sequence, [ids.size() x width].
Tensor encode_bits(std::span<const int> ids, std::size_t width);

// Forward process q(x_t | x_0). Discrete: each position becomes `mask_id`
// independently with probability 1 - alpha_t. Analog-bit: codewords become
// sqrt(alpha_t) * bits + sqrt(1 - alpha_t) * noise. Valid t: [0, steps].
NoisyState forward_corrupt(std::span<const int> x0, int t, const Schedule& schedule,
                           Framework framework, int mask_id, std::size_t vocab_size, Rng& rng);

}  // namespace sst::suggest
