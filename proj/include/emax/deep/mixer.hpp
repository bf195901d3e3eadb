#pragma once

#include "emax/deep/value_net.hpp"

namespace emax::deep {

/// Monotonic state-conditioned mixing network. Hypernetworks map the state
/// to non-negative mixing weights (through abs), so Q_tot is non-decreasing
/// in every agent value:
///
///   hidden = elu(q W1(s) + b1(s)),   Q_tot = hidden W2(s) + v(s)
class QmixMixer {
 public:
  QmixMixer() = default;
  QmixMixer(int n_agents, int state_size, int embed_size, int hypernet_size, Rng& init, const std::string& prefix);

  /// agent_values: B x n_agents, states: B x state_size -> B x 1.
  ad::NodeId build(ad::Graph& graph, ad::NodeId agent_values, ad::NodeId states);
  Tensor forward(const Tensor& agent_values, const Tensor& states) const;

  std::vector<ad::Parameter*> parameters();
  std::vector<const ad::Parameter*> parameters() const;
  void copy_from(const QmixMixer& other);

  int n_agents() const { return n_agents_; }
  int state_size() const { return state_size_; }
  int embed_size() const { return embed_size_; }

  // Named access for tests that pin the mixer to hand-set weights.
  enum Slot : std::size_t {
    W1Hidden, W1HiddenBias, W1Out, W1OutBias,
    B1, B1Bias,
    W2Hidden, W2HiddenBias, W2Out, W2OutBias,
    VHidden, VHiddenBias, VOut, VOutBias,
    kSlots
  };
  ad::Parameter& slot(Slot s) { return params_.at(s); }

 private:
  int n_agents_ = 0;
  int state_size_ = 0;
  int embed_size_ = 0;
  std::vector<ad::Parameter> params_;
};

}  // namespace emax::deep
