#pragma once

#include "emax/tensor.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace emax::ad {

/// A trainable tensor. Graphs reference parameters by address, so a
/// Parameter must outlive every graph built from it.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string name, Tensor value);

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

enum class OpKind : std::uint8_t {
  Input,
  Parameter,
  MatMul,
  Add,
  Subtract,
  Multiply,
  ScalarMultiply,
  Relu,
  Abs,
  Elu,
  Square,
  Sum,
  Mean,
  Concatenate,
  GatherEntries,
  SelectRows,
  SelectCols,
  StopGradient,
};

const char* op_name(OpKind kind);

struct NodeId {
  std::size_t index = 0;
  friend bool operator==(NodeId, NodeId) = default;
};

/// Define-by-run computation graph. Nodes are evaluated as soon as all of
/// their inputs carry values; placeholders created with a shape only are
/// bound later through forward().
class Graph {
 public:
  NodeId input(std::string name, Tensor value);
  NodeId placeholder(std::string name, Index rows, Index cols);
  NodeId constant(Tensor value);
  NodeId parameter(Parameter& p);

  NodeId matmul(NodeId a, NodeId b);
  /// b may be a 1 x n row that is broadcast over the rows of a.
  NodeId add(NodeId a, NodeId b);
  NodeId subtract(NodeId a, NodeId b);
  NodeId multiply(NodeId a, NodeId b);
  NodeId scale(NodeId a, double factor);
  NodeId relu(NodeId a);
  NodeId abs(NodeId a);
  NodeId elu(NodeId a);
  NodeId square(NodeId a);
  NodeId sum(NodeId a);
  NodeId mean(NodeId a);
  /// axis 0 stacks rows, axis 1 appends columns.
  NodeId concatenate(std::span<const NodeId> parts, int axis);
  /// Picks a(r, columns[r]) for every row; result is rows x 1.
  NodeId gather_entries(NodeId a, std::vector<Index> columns);
  NodeId select_rows(NodeId a, std::vector<Index> rows);
  NodeId select_cols(NodeId a, std::vector<Index> cols);
  NodeId stop_gradient(NodeId a);

  /// Rebinds named inputs, re-reads parameter values and re-evaluates every
  /// node in insertion order.
  void forward(const std::map<std::string, Tensor>& inputs = {});

  /// Reverse sweep from a scalar node. Parameter gradients are accumulated
  /// into Parameter::grad (initialised to zero if empty).
  void backward(NodeId loss);

  const Tensor& value(NodeId id) const;
  /// Adjoint of a node after backward(); zero for nodes off the loss path.
  Tensor grad(NodeId id) const;
  bool evaluated(NodeId id) const { return nodes_.at(id.index).evaluated; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    OpKind kind = OpKind::Input;
    std::vector<std::size_t> inputs;
    Tensor value;
    bool evaluated = false;
    bool requires_grad = false;
    double factor = 0.0;
    int axis = 0;
    std::vector<Index> indices;
    Parameter* param = nullptr;
    std::string name;
  };

  NodeId push(Node node);
  void evaluate(std::size_t index);
  [[noreturn]] void fail(std::size_t index, const std::string& what) const;

  std::vector<Node> nodes_;
  std::vector<Tensor> adjoints_;
  std::vector<bool> has_adjoint_;
};

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every element.
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double h);

}  // namespace emax::ad
