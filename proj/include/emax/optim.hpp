#pragma once

#include "emax/autodiff.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace emax::ad {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(AdamConfig cfg, std::span<Parameter* const> params);
};

/// One bias-corrected Adam update using each parameter's accumulated grad.
/// Throws before touching anything if a gradient is non-finite.
void adam_step(std::span<Parameter* const> params, AdamState& state);

/// Global L2 norm across every tensor.
double global_norm(std::span<const Tensor> grads);
double global_norm(std::span<Parameter* const> params);

/// Rescales all gradients by max_norm / norm when the global norm exceeds
/// max_norm. Returns the norm measured before clipping.
double clip_global_norm(std::span<Tensor> grads, double max_norm);
double clip_global_norm(std::span<Parameter* const> params, double max_norm);

}  // namespace emax::ad
