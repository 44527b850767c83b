#include "sst/autodiff/optim.hpp"

#include <algorithm>
#include <cmath>

#include "sst/error.hpp"

namespace sst::ad {

Adam::Adam(const ParameterStore& store, AdamConfig config) : config_(config) {
  m_.reserve(store.size());
  v_.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const Tensor& p = store.value(i);
    m_.emplace_back(p.shape(), 0.0);
    v_.emplace_back(p.shape(), 0.0);
  }
}

double Adam::learning_rate() const {
  const double s = static_cast<double>(step_ + 1);
  double lr = config_.peak_lr;
  if (config_.warmup_steps > 0 && step_ < config_.warmup_steps) {
    lr *= s / static_cast<double>(config_.warmup_steps);
  } else if (config_.total_steps > config_.warmup_steps) {
    const double span = static_cast<double>(config_.total_steps - config_.warmup_steps);
    const double done = static_cast<double>(step_ - config_.warmup_steps);
    lr *= std::max(0.0, 1.0 - done / span);
  }
  return lr;
}

void Adam::step(ParameterStore& store, const Gradients& grads) {
  if (grads.size() != store.size()) throw Error("Adam::step: gradient/parameter count mismatch");
  const double lr = learning_rate();
  ++step_;
  double clip = 1.0;
  if (config_.clip_norm > 0.0) {
    const double norm = grads.global_norm();
    if (!std::isfinite(norm)) throw Error("Adam::step: non-finite gradient norm");
    if (norm > config_.clip_norm) clip = config_.clip_norm / norm;
  }
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < store.size(); ++i) {
    const Tensor& g = grads.at(i);
    if (g.empty()) continue;
    Tensor& p = store.value(i);
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g[j] * clip;
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * gj;
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * gj * gj;
      p[j] -= lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + config_.epsilon);
    }
  }
}

}  // namespace sst::ad
