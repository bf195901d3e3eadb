#include "emax/autodiff.hpp"

#include <cmath>

namespace emax::ad {

Parameter::Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)) {
  grad = Tensor::Zero(value.rows(), value.cols());
}

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::Input: return "input";
    case OpKind::Parameter: return "parameter";
    case OpKind::MatMul: return "matmul";
    case OpKind::Add: return "add";
    case OpKind::Subtract: return "subtract";
    case OpKind::Multiply: return "multiply";
    case OpKind::ScalarMultiply: return "scalar-multiply";
    case OpKind::Relu: return "relu";
    case OpKind::Abs: return "abs";
    case OpKind::Elu: return "elu";
    case OpKind::Square: return "square";
    case OpKind::Sum: return "sum";
    case OpKind::Mean: return "mean";
    case OpKind::Concatenate: return "concatenate";
    case OpKind::GatherEntries: return "gather-entries";
    case OpKind::SelectRows: return "select-rows";
    case OpKind::SelectCols: return "select-cols";
    case OpKind::StopGradient: return "stop-gradient";
  }
  return "unknown";
}

void Graph::fail(std::size_t index, const std::string& what) const {
  const Node& n = nodes_[index];
  std::string label = "node " + std::to_string(index) + " (" + op_name(n.kind);
  if (!n.name.empty()) label += " '" + n.name + "'";
  throw Error(label + "): " + what);
}

NodeId Graph::push(Node node) {
  bool ready = true;
  for (std::size_t in : node.inputs) {
    if (in >= nodes_.size()) throw Error("graph: input id out of range");
    if (node.kind != OpKind::StopGradient) node.requires_grad = node.requires_grad || nodes_[in].requires_grad;
    ready = ready && nodes_[in].evaluated;
  }
  nodes_.push_back(std::move(node));
  const std::size_t index = nodes_.size() - 1;
  if (ready) evaluate(index);
  return NodeId{index};
}

NodeId Graph::input(std::string name, Tensor value) {
  Node n;
  n.kind = OpKind::Input;
  n.name = std::move(name);
  n.value = std::move(value);
  n.evaluated = true;
  nodes_.push_back(std::move(n));
  return NodeId{nodes_.size() - 1};
}

NodeId Graph::placeholder(std::string name, Index rows, Index cols) {
  Node n;
  n.kind = OpKind::Input;
  n.name = std::move(name);
  n.value = Tensor::Zero(rows, cols);
  n.evaluated = false;
  nodes_.push_back(std::move(n));
  return NodeId{nodes_.size() - 1};
}

NodeId Graph::constant(Tensor value) { return input({}, std::move(value)); }

NodeId Graph::parameter(Parameter& p) {
  Node n;
  n.kind = OpKind::Parameter;
  n.name = p.name;
  n.param = &p;
  n.requires_grad = true;
  n.value = p.value;
  n.evaluated = true;
  nodes_.push_back(std::move(n));
  return NodeId{nodes_.size() - 1};
}

namespace {

template <typename... Ids>
std::vector<std::size_t> ids(Ids... nodes) {
  return {nodes.index...};
}

}  // namespace

NodeId Graph::matmul(NodeId a, NodeId b) {
  Node n;
  n.kind = OpKind::MatMul;
  n.inputs = ids(a, b);
  return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
  Node n;
  n.kind = OpKind::Add;
  n.inputs = ids(a, b);
  return push(std::move(n));
}

NodeId Graph::subtract(NodeId a, NodeId b) {
  Node n;
  n.kind = OpKind::Subtract;
  n.inputs = ids(a, b);
  return push(std::move(n));
}

NodeId Graph::multiply(NodeId a, NodeId b) {
  Node n;
  n.kind = OpKind::Multiply;
  n.inputs = ids(a, b);
  return push(std::move(n));
}

NodeId Graph::scale(NodeId a, double factor) {
  Node n;
  n.kind = OpKind::ScalarMultiply;
  n.inputs = ids(a);
  n.factor = factor;
  return push(std::move(n));
}

#define EMAX_UNARY(fn, kind_)      \
  NodeId Graph::fn(NodeId a) {     \
    Node n;                        \
    n.kind = OpKind::kind_;        \
    n.inputs = ids(a);             \
    return push(std::move(n));     \
  }

EMAX_UNARY(relu, Relu)
EMAX_UNARY(abs, Abs)
EMAX_UNARY(elu, Elu)
EMAX_UNARY(square, Square)
EMAX_UNARY(sum, Sum)
EMAX_UNARY(mean, Mean)
EMAX_UNARY(stop_gradient, StopGradient)

#undef EMAX_UNARY

NodeId Graph::concatenate(std::span<const NodeId> parts, int axis) {
  if (parts.empty()) throw Error("concatenate: no inputs");
  if (axis != 0 && axis != 1) throw Error("concatenate: axis must be 0 or 1");
  Node n;
  n.kind = OpKind::Concatenate;
  n.axis = axis;
  for (NodeId p : parts) n.inputs.push_back(p.index);
  return push(std::move(n));
}

NodeId Graph::gather_entries(NodeId a, std::vector<Index> columns) {
  Node n;
  n.kind = OpKind::GatherEntries;
  n.inputs = ids(a);
  n.indices = std::move(columns);
  return push(std::move(n));
}

NodeId Graph::select_rows(NodeId a, std::vector<Index> rows) {
  Node n;
  n.kind = OpKind::SelectRows;
  n.inputs = ids(a);
  n.indices = std::move(rows);
  return push(std::move(n));
}

NodeId Graph::select_cols(NodeId a, std::vector<Index> cols) {
  Node n;
  n.kind = OpKind::SelectCols;
  n.inputs = ids(a);
  n.indices = std::move(cols);
  return push(std::move(n));
}

void Graph::evaluate(std::size_t index) {
  Node& n = nodes_[index];
  auto in = [&](std::size_t k) -> const Tensor& { return nodes_[n.inputs[k]].value; };

  switch (n.kind) {
    case OpKind::Input:
      break;
    case OpKind::Parameter:
      n.value = n.param->value;
      break;
    case OpKind::MatMul: {
      const Tensor& a = in(0);
      const Tensor& b = in(1);
      if (a.cols() != b.rows()) fail(index, "shape mismatch " + shape_string(a) + " x " + shape_string(b));
      n.value.noalias() = a * b;
      break;
    }
    case OpKind::Add:
    case OpKind::Subtract: {
      const Tensor& a = in(0);
      const Tensor& b = in(1);
      const double sign = n.kind == OpKind::Add ? 1.0 : -1.0;
      if (a.rows() == b.rows() && a.cols() == b.cols()) {
        n.value = a + sign * b;
      } else if (b.rows() == 1 && b.cols() == a.cols()) {
        n.value = a;
        n.value.rowwise() += sign * b.row(0);
      } else {
        fail(index, "shape mismatch " + shape_string(a) + " vs " + shape_string(b));
      }
      break;
    }
    case OpKind::Multiply: {
      const Tensor& a = in(0);
      const Tensor& b = in(1);
      if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(index, "shape mismatch " + shape_string(a) + " vs " + shape_string(b));
      n.value = a.cwiseProduct(b);
      break;
    }
    case OpKind::ScalarMultiply:
      n.value = n.factor * in(0);
      break;
    case OpKind::Relu:
      n.value = in(0).cwiseMax(0.0);
      break;
    case OpKind::Abs:
      n.value = in(0).cwiseAbs();
      break;
    case OpKind::Elu:
      n.value = in(0).unaryExpr([](double x) { return x > 0.0 ? x : std::expm1(x); });
      break;
    case OpKind::Square:
      n.value = in(0).array().square().matrix();
      break;
    case OpKind::Sum:
      n.value = Tensor::Constant(1, 1, in(0).sum());
      break;
    case OpKind::Mean:
      if (in(0).size() == 0) fail(index, "mean of empty tensor");
      n.value = Tensor::Constant(1, 1, in(0).mean());
      break;
    case OpKind::Concatenate: {
      Index rows = 0;
      Index cols = 0;
      const Tensor& first = in(0);
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        const Tensor& part = in(k);
        if (n.axis == 0) {
          if (part.cols() != first.cols()) fail(index, "column mismatch " + shape_string(part));
          rows += part.rows();
        } else {
          if (part.rows() != first.rows()) fail(index, "row mismatch " + shape_string(part));
          cols += part.cols();
        }
      }
      if (n.axis == 0) cols = first.cols();
      else rows = first.rows();
      n.value.resize(rows, cols);
      Index offset = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        const Tensor& part = in(k);
        if (n.axis == 0) {
          n.value.middleRows(offset, part.rows()) = part;
          offset += part.rows();
        } else {
          n.value.middleCols(offset, part.cols()) = part;
          offset += part.cols();
        }
      }
      break;
    }
    case OpKind::GatherEntries: {
      const Tensor& a = in(0);
      if (static_cast<Index>(n.indices.size()) != a.rows())
        fail(index, "expected " + std::to_string(a.rows()) + " indices, got " + std::to_string(n.indices.size()));
      n.value.resize(a.rows(), 1);
      for (Index r = 0; r < a.rows(); ++r) {
        const Index c = n.indices[static_cast<std::size_t>(r)];
        if (c < 0 || c >= a.cols()) fail(index, "column index " + std::to_string(c) + " out of range");
        n.value(r, 0) = a(r, c);
      }
      break;
    }
    case OpKind::SelectRows: {
      const Tensor& a = in(0);
      n.value.resize(static_cast<Index>(n.indices.size()), a.cols());
      for (std::size_t r = 0; r < n.indices.size(); ++r) {
        const Index src = n.indices[r];
        if (src < 0 || src >= a.rows()) fail(index, "row index " + std::to_string(src) + " out of range");
        n.value.row(static_cast<Index>(r)) = a.row(src);
      }
      break;
    }
    case OpKind::SelectCols: {
      const Tensor& a = in(0);
      n.value.resize(a.rows(), static_cast<Index>(n.indices.size()));
      for (std::size_t c = 0; c < n.indices.size(); ++c) {
        const Index src = n.indices[c];
        if (src < 0 || src >= a.cols()) fail(index, "column index " + std::to_string(src) + " out of range");
        n.value.col(static_cast<Index>(c)) = a.col(src);
      }
      break;
    }
    case OpKind::StopGradient:
      n.value = in(0);
      break;
  }

  if (!n.value.allFinite()) fail(index, "non-finite output");
  n.evaluated = true;
}

void Graph::forward(const std::map<std::string, Tensor>& inputs) {
  for (const auto& [name, tensor] : inputs) {
    bool bound = false;
    for (Node& n : nodes_) {
      if (n.kind == OpKind::Input && n.name == name) {
        if (n.value.rows() != tensor.rows() || n.value.cols() != tensor.cols())
          throw Error("forward: input '" + name + "' expects " + shape_string(n.value) + ", got " +
                      shape_string(tensor));
        n.value = tensor;
        n.evaluated = true;
        bound = true;
      }
    }
    if (!bound) throw Error("forward: no input named '" + name + "'");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == OpKind::Input) {
      if (!nodes_[i].evaluated) fail(i, "input not bound");
      continue;
    }
    evaluate(i);
  }
}

const Tensor& Graph::value(NodeId id) const {
  const Node& n = nodes_.at(id.index);
  if (!n.evaluated) throw Error("value: node " + std::to_string(id.index) + " not evaluated");
  return n.value;
}

Tensor Graph::grad(NodeId id) const {
  const Node& n = nodes_.at(id.index);
  if (id.index < has_adjoint_.size() && has_adjoint_[id.index]) return adjoints_[id.index];
  return Tensor::Zero(n.value.rows(), n.value.cols());
}

void Graph::backward(NodeId loss) {
  if (loss.index >= nodes_.size()) throw Error("backward: loss id out of range");
  for (std::size_t i = 0; i <= loss.index; ++i) {
    if (!nodes_[i].evaluated) throw Error("backward: forward has not been run (node " + std::to_string(i) + ")");
  }
  const Tensor& lv = nodes_[loss.index].value;
  if (lv.rows() != 1 || lv.cols() != 1) throw Error("backward: loss is not scalar " + shape_string(lv));

  adjoints_.assign(nodes_.size(), Tensor());
  has_adjoint_.assign(nodes_.size(), false);
  adjoints_[loss.index] = Tensor::Ones(1, 1);
  has_adjoint_[loss.index] = true;

  auto accumulate = [&](std::size_t target, const auto& contribution) {
    if (!nodes_[target].requires_grad) return;
    if (has_adjoint_[target]) {
      adjoints_[target] += contribution;
    } else {
      adjoints_[target] = contribution;
      has_adjoint_[target] = true;
    }
  };

  for (std::size_t idx = loss.index + 1; idx-- > 0;) {
    if (!has_adjoint_[idx]) continue;
    Node& n = nodes_[idx];
    const Tensor& g = adjoints_[idx];
    auto in = [&](std::size_t k) -> const Tensor& { return nodes_[n.inputs[k]].value; };

    switch (n.kind) {
      case OpKind::Input:
      case OpKind::StopGradient:
        break;
      case OpKind::Parameter:
        if (n.param->grad.rows() != n.value.rows() || n.param->grad.cols() != n.value.cols())
          n.param->grad = Tensor::Zero(n.value.rows(), n.value.cols());
        n.param->grad += g;
        break;
      case OpKind::MatMul: {
        if (nodes_[n.inputs[0]].requires_grad) {
          Tensor da = g * in(1).transpose();
          accumulate(n.inputs[0], da);
        }
        if (nodes_[n.inputs[1]].requires_grad) {
          Tensor db = in(0).transpose() * g;
          accumulate(n.inputs[1], db);
        }
        break;
      }
      case OpKind::Add:
      case OpKind::Subtract: {
        accumulate(n.inputs[0], g);
        if (nodes_[n.inputs[1]].requires_grad) {
          const double sign = n.kind == OpKind::Add ? 1.0 : -1.0;
          if (in(1).rows() == g.rows()) {
            Tensor db = sign * g;
            accumulate(n.inputs[1], db);
          } else {
            Tensor db = sign * g.colwise().sum();
            accumulate(n.inputs[1], db);
          }
        }
        break;
      }
      case OpKind::Multiply: {
        if (nodes_[n.inputs[0]].requires_grad) {
          Tensor da = g.cwiseProduct(in(1));
          accumulate(n.inputs[0], da);
        }
        if (nodes_[n.inputs[1]].requires_grad) {
          Tensor db = g.cwiseProduct(in(0));
          accumulate(n.inputs[1], db);
        }
        break;
      }
      case OpKind::ScalarMultiply: {
        Tensor da = n.factor * g;
        accumulate(n.inputs[0], da);
        break;
      }
      case OpKind::Relu: {
        Tensor da = g.cwiseProduct(in(0).unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; }));
        accumulate(n.inputs[0], da);
        break;
      }
      case OpKind::Abs: {
        Tensor da = g.cwiseProduct(in(0).unaryExpr([](double x) { return (x > 0.0) - (x < 0.0) + 0.0; }));
        accumulate(n.inputs[0], da);
        break;
      }
      case OpKind::Elu: {
        // d/dx elu(x) = 1 for x > 0, exp(x) = elu(x) + 1 otherwise
        Tensor da = g.cwiseProduct(n.value.binaryExpr(
            in(0), [](double y, double x) { return x > 0.0 ? 1.0 : y + 1.0; }));
        accumulate(n.inputs[0], da);
        break;
      }
      case OpKind::Square: {
        Tensor da = 2.0 * g.cwiseProduct(in(0));
        accumulate(n.inputs[0], da);
        break;
      }
      case OpKind::Sum: {
        Tensor da = Tensor::Constant(in(0).rows(), in(0).cols(), g(0, 0));
        accumulate(n.inputs[0], da);
        break;
      }
      case OpKind::Mean: {
        const double scale = g(0, 0) / static_cast<double>(in(0).size());
        Tensor da = Tensor::Constant(in(0).rows(), in(0).cols(), scale);
        accumulate(n.inputs[0], da);
        break;
      }
      case OpKind::Concatenate: {
        Index offset = 0;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          const Tensor& part = in(k);
          if (n.axis == 0) {
            Tensor da = g.middleRows(offset, part.rows());
            accumulate(n.inputs[k], da);
            offset += part.rows();
          } else {
            Tensor da = g.middleCols(offset, part.cols());
            accumulate(n.inputs[k], da);
            offset += part.cols();
          }
        }
        break;
      }
      case OpKind::GatherEntries: {
        Tensor da = Tensor::Zero(in(0).rows(), in(0).cols());
        for (Index r = 0; r < da.rows(); ++r) da(r, n.indices[static_cast<std::size_t>(r)]) += g(r, 0);
        accumulate(n.inputs[0], da);
        break;
      }
      case OpKind::SelectRows: {
        Tensor da = Tensor::Zero(in(0).rows(), in(0).cols());
        for (std::size_t r = 0; r < n.indices.size(); ++r) da.row(n.indices[r]) += g.row(static_cast<Index>(r));
        accumulate(n.inputs[0], da);
        break;
      }
      case OpKind::SelectCols: {
        Tensor da = Tensor::Zero(in(0).rows(), in(0).cols());
        for (std::size_t c = 0; c < n.indices.size(); ++c) da.col(n.indices[c]) += g.col(static_cast<Index>(c));
        accumulate(n.inputs[0], da);
        break;
      }
    }
  }
}

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double h) {
  if (!(h > 0.0)) throw Error("finite_diff_grad: step must be positive");
  Tensor grad(x.rows(), x.cols());
  Tensor probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double orig = probe.data()[i];
    probe.data()[i] = orig + h;
    const double plus = f(probe);
    probe.data()[i] = orig - h;
    const double minus = f(probe);
    probe.data()[i] = orig;
    grad.data()[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

}  // namespace emax::ad
