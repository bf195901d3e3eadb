#pragma once

#include "emax/autodiff.hpp"

#include <memory>
#include <string>
#include <vector>

namespace emax::deep {

/// Feedforward action-value network: input -> hidden -> hidden -> actions,
/// ReLU between layers.
class ValueNet {
 public:
  ValueNet() = default;
  ValueNet(int input_size, int hidden_size, int n_actions, Rng& init, const std::string& prefix);

  /// Plain evaluation, one row of action values per input row.
  Tensor forward(const Tensor& inputs) const;
  /// Records the same computation into a graph.
  ad::NodeId build(ad::Graph& graph, ad::NodeId inputs);

  std::vector<ad::Parameter*> parameters();
  std::vector<const ad::Parameter*> parameters() const;
  /// Hard copy of all parameter values (names are kept).
  void copy_from(const ValueNet& other);

  int input_size() const { return input_size_; }
  int n_actions() const { return n_actions_; }

 private:
  int input_size_ = 0;
  int n_actions_ = 0;
  // weights are [fan_in x fan_out], biases [1 x fan_out]
  std::vector<ad::Parameter> layers_;
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation for a linear layer.
ad::Parameter init_linear_weight(const std::string& name, int fan_in, int fan_out, Rng& rng);
ad::Parameter init_linear_bias(const std::string& name, int fan_in, int fan_out, Rng& rng);

/// Appends `x W + b` to the graph.
ad::NodeId linear(ad::Graph& graph, ad::NodeId x, ad::Parameter& weight, ad::Parameter& bias);

}  // namespace emax::deep
