#include "emax/deep/mixer.hpp"

#include <cmath>

namespace emax::deep {

namespace {

Tensor dense(const Tensor& x, const ad::Parameter& w, const ad::Parameter& b) {
  Tensor out = x * w.value;
  out.rowwise() += b.value.row(0);
  return out;
}

}  // namespace

QmixMixer::QmixMixer(int n_agents, int state_size, int embed_size, int hypernet_size, Rng& init,
                     const std::string& prefix)
    : n_agents_(n_agents), state_size_(state_size), embed_size_(embed_size) {
  if (n_agents < 1 || state_size < 1 || embed_size < 1 || hypernet_size < 1)
    throw Error("QmixMixer: sizes must be positive");
  const int n = n_agents, s = state_size, e = embed_size, h = hypernet_size;
  struct Layer {
    const char* name;
    int in, out;
  };
  const Layer layers[] = {{"hyper_w1/fc1", s, h}, {"hyper_w1/fc2", h, n * e}, {"hyper_b1", s, e},
                          {"hyper_w2/fc1", s, h}, {"hyper_w2/fc2", h, e},     {"value/fc1", s, e},
                          {"value/fc2", e, 1}};
  params_.reserve(kSlots);
  for (const Layer& l : layers) {
    params_.push_back(init_linear_weight(prefix + "/" + l.name + "/w", l.in, l.out, init));
    params_.push_back(init_linear_bias(prefix + "/" + l.name + "/b", l.in, l.out, init));
  }
}

ad::NodeId QmixMixer::build(ad::Graph& g, ad::NodeId q, ad::NodeId s) {
  auto p = [&](Slot slot) -> ad::Parameter& { return params_.at(slot); };

  ad::NodeId w1 = g.abs(linear(g, g.relu(linear(g, s, p(W1Hidden), p(W1HiddenBias))), p(W1Out), p(W1OutBias)));
  ad::NodeId b1 = linear(g, s, p(B1), p(B1Bias));
  ad::NodeId ones_row = g.constant(Tensor::Ones(1, embed_size_));

  ad::NodeId pre = b1;
  for (int i = 0; i < n_agents_; ++i) {
    std::vector<Index> cols(static_cast<std::size_t>(embed_size_));
    for (int j = 0; j < embed_size_; ++j) cols[static_cast<std::size_t>(j)] = i * embed_size_ + j;
    ad::NodeId qi = g.matmul(g.select_cols(q, {i}), ones_row);
    pre = g.add(pre, g.multiply(qi, g.select_cols(w1, std::move(cols))));
  }
  ad::NodeId hidden = g.elu(pre);

  ad::NodeId w2 = g.abs(linear(g, g.relu(linear(g, s, p(W2Hidden), p(W2HiddenBias))), p(W2Out), p(W2OutBias)));
  ad::NodeId v = linear(g, g.relu(linear(g, s, p(VHidden), p(VHiddenBias))), p(VOut), p(VOutBias));
  ad::NodeId ones_col = g.constant(Tensor::Ones(embed_size_, 1));
  return g.add(g.matmul(g.multiply(hidden, w2), ones_col), v);
}

Tensor QmixMixer::forward(const Tensor& q, const Tensor& s) const {
  if (q.cols() != n_agents_ || s.cols() != state_size_ || q.rows() != s.rows())
    throw Error("QmixMixer: expected " + std::to_string(n_agents_) + " agent values and " +
                std::to_string(state_size_) + " state features per row");
  const auto& P = params_;
  const Tensor w1 = dense(dense(s, P[W1Hidden], P[W1HiddenBias]).cwiseMax(0.0), P[W1Out], P[W1OutBias]).cwiseAbs();
  const Tensor w2 = dense(dense(s, P[W2Hidden], P[W2HiddenBias]).cwiseMax(0.0), P[W2Out], P[W2OutBias]).cwiseAbs();
  const Tensor v = dense(dense(s, P[VHidden], P[VHiddenBias]).cwiseMax(0.0), P[VOut], P[VOutBias]);
  Tensor pre = dense(s, P[B1], P[B1Bias]);
  for (Index r = 0; r < q.rows(); ++r)
    for (int i = 0; i < n_agents_; ++i)
      pre.row(r) += q(r, i) * w1.block(r, i * embed_size_, 1, embed_size_);
  const Tensor hidden = pre.unaryExpr([](double x) { return x > 0.0 ? x : std::expm1(x); });
  Tensor out(q.rows(), 1);
  for (Index r = 0; r < q.rows(); ++r) out(r, 0) = hidden.row(r).dot(w2.row(r)) + v(r, 0);
  return out;
}

std::vector<ad::Parameter*> QmixMixer::parameters() {
  std::vector<ad::Parameter*> out;
  for (ad::Parameter& p : params_) out.push_back(&p);
  return out;
}

std::vector<const ad::Parameter*> QmixMixer::parameters() const {
  std::vector<const ad::Parameter*> out;
  for (const ad::Parameter& p : params_) out.push_back(&p);
  return out;
}

void QmixMixer::copy_from(const QmixMixer& other) {
  if (other.params_.size() != params_.size()) throw Error("QmixMixer::copy_from: architecture mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].value.rows() != other.params_[i].value.rows() ||
        params_[i].value.cols() != other.params_[i].value.cols())
      throw Error("QmixMixer::copy_from: shape mismatch in " + params_[i].name);
    params_[i].value = other.params_[i].value;
  }
}

}  // namespace emax::deep
