#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sitr/ng/tensor.hpp"

namespace sitr::ng {

template <class S>
struct AdamConfig {
  S lr = S(1e-4);
  S beta1 = S(0.9);
  S beta2 = S(0.999);
  S eps = S(1e-8);
};

// One bias-corrected Adam update. `t` is the 1-based step count.
template <class S>
void adam_step(std::span<S> param, std::span<const S> grad, std::span<S> m,
               std::span<S> v, std::int64_t t, const AdamConfig<S>& cfg) {
  if (param.size() != grad.size() || param.size() != m.size() ||
      param.size() != v.size())
    throw shape_error("adam_step buffer sizes disagree");
  if (t < 1) throw contract_error("adam_step requires t >= 1");
  const S bc1 = S(1) - std::pow(cfg.beta1, static_cast<S>(t));
  const S bc2 = S(1) - std::pow(cfg.beta2, static_cast<S>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (S(1) - cfg.beta1) * grad[i];
    v[i] = cfg.beta2 * v[i] + (S(1) - cfg.beta2) * grad[i] * grad[i];
    const S mhat = m[i] / bc1;
    const S vhat = v[i] / bc2;
    param[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

// Optimizer over a fixed parameter list; moment buffers are owned here.
template <class S>
class Adam {
 public:
  Adam(std::vector<Tensor<S>> params, AdamConfig<S> cfg)
      : params_(std::move(params)), cfg_(cfg) {
    for (const auto& p : params_) {
      m_.emplace_back(p.numel(), S(0));
      v_.emplace_back(p.numel(), S(0));
    }
  }

  const AdamConfig<S>& config() const { return cfg_; }
  void set_lr(S lr) { cfg_.lr = lr; }
  std::int64_t step_count() const { return t_; }

  // Parameters whose gradient was never touched this step update with g = 0.
  void step() {
    ++t_;
    std::vector<S> zeros;
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& p = params_[i];
      std::span<const S> g = p.grad();
      if (g.empty()) {
        zeros.assign(static_cast<std::size_t>(p.numel()), S(0));
        g = {zeros.data(), zeros.size()};
      }
      adam_step<S>(p.data(), g, {m_[i].data(), m_[i].size()},
                   {v_[i].data(), v_[i].size()}, t_, cfg_);
    }
  }

  void zero_grad() {
    for (auto& p : params_) p.zero_grad();
  }

 private:
  std::vector<Tensor<S>> params_;
  std::vector<std::vector<S>> m_, v_;
  AdamConfig<S> cfg_;
  std::int64_t t_ = 0;
};

}  // namespace sitr::ng
