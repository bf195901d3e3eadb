#include "emax/deep/value_net.hpp"

#include "emax/rng.hpp"

#include <cmath>

namespace emax::deep {

namespace {

Tensor uniform_tensor(Index rows, Index cols, double bound, Rng& rng) {
  Tensor t(rows, cols);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
  return t;
}

}  // namespace

ad::Parameter init_linear_weight(const std::string& name, int fan_in, int fan_out, Rng& rng) {
  return ad::Parameter(name, uniform_tensor(fan_in, fan_out, 1.0 / std::sqrt(static_cast<double>(fan_in)), rng));
}

ad::Parameter init_linear_bias(const std::string& name, int fan_in, int fan_out, Rng& rng) {
  return ad::Parameter(name, uniform_tensor(1, fan_out, 1.0 / std::sqrt(static_cast<double>(fan_in)), rng));
}

ad::NodeId linear(ad::Graph& graph, ad::NodeId x, ad::Parameter& weight, ad::Parameter& bias) {
  return graph.add(graph.matmul(x, graph.parameter(weight)), graph.parameter(bias));
}

ValueNet::ValueNet(int input_size, int hidden_size, int n_actions, Rng& init, const std::string& prefix)
    : input_size_(input_size), n_actions_(n_actions) {
  if (input_size < 1 || hidden_size < 1 || n_actions < 1) throw Error("ValueNet: sizes must be positive");
  const int sizes[] = {input_size, hidden_size, hidden_size, n_actions};
  layers_.reserve(6);
  for (int l = 0; l < 3; ++l) {
    layers_.push_back(init_linear_weight(prefix + "/fc" + std::to_string(l + 1) + "/w", sizes[l], sizes[l + 1], init));
    layers_.push_back(init_linear_bias(prefix + "/fc" + std::to_string(l + 1) + "/b", sizes[l], sizes[l + 1], init));
  }
}

Tensor ValueNet::forward(const Tensor& inputs) const {
  if (inputs.cols() != input_size_)
    throw Error("ValueNet: expected " + std::to_string(input_size_) + " input columns, got " + std::to_string(inputs.cols()));
  Tensor h = inputs * layers_[0].value;
  h.rowwise() += layers_[1].value.row(0);
  h = h.cwiseMax(0.0);
  Tensor h2 = h * layers_[2].value;
  h2.rowwise() += layers_[3].value.row(0);
  h2 = h2.cwiseMax(0.0);
  Tensor out = h2 * layers_[4].value;
  out.rowwise() += layers_[5].value.row(0);
  return out;
}

ad::NodeId ValueNet::build(ad::Graph& graph, ad::NodeId inputs) {
  ad::NodeId h = graph.relu(linear(graph, inputs, layers_[0], layers_[1]));
  h = graph.relu(linear(graph, h, layers_[2], layers_[3]));
  return linear(graph, h, layers_[4], layers_[5]);
}

std::vector<ad::Parameter*> ValueNet::parameters() {
  std::vector<ad::Parameter*> out;
  for (ad::Parameter& p : layers_) out.push_back(&p);
  return out;
}

std::vector<const ad::Parameter*> ValueNet::parameters() const {
  std::vector<const ad::Parameter*> out;
  for (const ad::Parameter& p : layers_) out.push_back(&p);
  return out;
}

void ValueNet::copy_from(const ValueNet& other) {
  if (other.layers_.size() != layers_.size()) throw Error("ValueNet::copy_from: architecture mismatch");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].value.rows() != other.layers_[i].value.rows() || layers_[i].value.cols() != other.layers_[i].value.cols())
      throw Error("ValueNet::copy_from: shape mismatch in " + layers_[i].name);
    layers_[i].value = other.layers_[i].value;
  }
}

}  // namespace emax::deep
