#include "emax/optim.hpp"

#include <cmath>

namespace emax::ad {

AdamState::AdamState(AdamConfig cfg, std::span<Parameter* const> params) : config(cfg) {
  first_moment.reserve(params.size());
  second_moment.reserve(params.size());
  for (const Parameter* p : params) {
    first_moment.push_back(Tensor::Zero(p->value.rows(), p->value.cols()));
    second_moment.push_back(Tensor::Zero(p->value.rows(), p->value.cols()));
  }
}

void adam_step(std::span<Parameter* const> params, AdamState& state) {
  if (params.size() != state.first_moment.size() || params.size() != state.second_moment.size())
    throw Error("adam_step: parameter count does not match optimiser state");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = *params[i];
    if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols())
      throw Error("adam_step: gradient shape mismatch for '" + p.name + "'");
    if (state.first_moment[i].rows() != p.value.rows() || state.first_moment[i].cols() != p.value.cols())
      throw Error("adam_step: moment shape mismatch for '" + p.name + "'");
    if (!p.grad.allFinite()) throw Error("adam_step: non-finite gradient for '" + p.name + "'");
  }

  const AdamConfig& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    Tensor& m = state.first_moment[i];
    Tensor& v = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * p.grad;
    v = c.beta2 * v + (1.0 - c.beta2) * p.grad.cwiseAbs2();
    p.value.array() -= c.lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + c.eps);
  }
}

double global_norm(std::span<const Tensor> grads) {
  double sq = 0.0;
  for (const Tensor& g : grads) sq += g.squaredNorm();
  return std::sqrt(sq);
}

double global_norm(std::span<Parameter* const> params) {
  double sq = 0.0;
  for (const Parameter* p : params) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

namespace {

void check_clip(double norm, double max_norm) {
  if (!(max_norm > 0.0)) throw Error("clip_global_norm: max_norm must be positive");
  if (!std::isfinite(norm)) throw Error("clip_global_norm: non-finite gradient");
}

}  // namespace

double clip_global_norm(std::span<Tensor> grads, double max_norm) {
  const double norm = global_norm(std::span<const Tensor>(grads.data(), grads.size()));
  check_clip(norm, max_norm);
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (Tensor& g : grads) g *= factor;
  }
  return norm;
}

double clip_global_norm(std::span<Parameter* const> params, double max_norm) {
  const double norm = global_norm(params);
  check_clip(norm, max_norm);
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (Parameter* p : params) p->grad *= factor;
  }
  return norm;
}

}  // namespace emax::ad
