#pragma once

#include <array>
#include <vector>

#include "interactivity/types.hpp"

namespace interactivity::autodiff {

using NodeId = int;

enum class OpKind {
  Constant,
  Parameter,
  MatVec,       // A * x
  Add,          // x + y (same shape)
  Sub,          // x - y
  Scale,        // c * x, c a recorded constant scalar
  Relu,
  RmsNorm,      // x / sqrt(mean(x^2) + eps)
  StopGrad,
  Outer,        // u * v^T
  SquaredNorm,  // ||X||_F^2, scalar result
};

struct GraphNode {
  Matrix value;
  OpKind op = OpKind::Constant;
  std::array<NodeId, 2> parents{-1, -1};
  double coeff = 0.0;  // Scale coefficient or RmsNorm epsilon
};

/// Explicitly recorded computation graph. Nodes are appended in topological
/// order; a single reverse pass over the recording order computes gradients.
/// Values are never mutated after recording.
class Graph {
 public:
  NodeId constant(Matrix value) { return push({std::move(value), OpKind::Constant, {-1, -1}, 0.0}); }
  NodeId parameter(Matrix value) { return push({std::move(value), OpKind::Parameter, {-1, -1}, 0.0}); }

  NodeId matvec(NodeId a, NodeId x);
  NodeId add(NodeId x, NodeId y);
  NodeId sub(NodeId x, NodeId y);
  NodeId scale(NodeId x, double c);
  NodeId relu(NodeId x);
  NodeId rmsnorm(NodeId x, double epsilon);
  NodeId stopgrad(NodeId x);
  NodeId outer(NodeId u, NodeId v);
  NodeId squared_norm(NodeId x);

  const Matrix& value(NodeId id) const { return nodes_[static_cast<size_t>(id)].value; }
  double scalar(NodeId id) const { return value(id)(0, 0); }
  size_t size() const { return nodes_.size(); }

  /// Gradient of the scalar at `root` with respect to every node.
  /// Throws std::invalid_argument if the root is not 1x1.
  std::vector<Matrix> backward(NodeId root) const;

 private:
  NodeId push(GraphNode node);
  const GraphNode& node(NodeId id) const { return nodes_[static_cast<size_t>(id)]; }

  std::vector<GraphNode> nodes_;
};

}  // namespace interactivity::autodiff
