#pragma once

#include <cstddef>
#include <vector>

#include "sst/autodiff/parameters.hpp"

namespace sst::ad {

struct AdamConfig {
  double peak_lr = 3e-4;
  std::size_t warmup_steps = 200;
  // Learning rate decays linearly to zero at this step; 0 disables decay.
  std::size_t total_steps = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global-norm clipping threshold; 0 disables clipping.
  double clip_norm = 1.0;
};

class Adam {
 public:
  Adam(const ParameterStore& store, AdamConfig config);

  // Applies one update; parameters without a gradient are left untouched.
  void step(ParameterStore& store, const Gradients& grads);

  double learning_rate() const;  // rate the next step() will use
  std::size_t steps_taken() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::size_t step_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace sst::ad
