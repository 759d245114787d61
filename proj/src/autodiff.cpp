#include "interactivity/autodiff.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace interactivity::autodiff {

namespace {

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  std::ostringstream msg;
  msg << op << ": incompatible shapes " << a.rows() << "x" << a.cols() << " and " << b.rows()
      << "x" << b.cols();
  throw std::invalid_argument(msg.str());
}

double rms_scale(const Matrix& x, double epsilon) {
  return std::sqrt(x.squaredNorm() / static_cast<double>(x.size()) + epsilon);
}

}  // namespace

NodeId Graph::push(GraphNode node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Graph::matvec(NodeId a, NodeId x) {
  const Matrix& av = value(a);
  const Matrix& xv = value(x);
  if (av.cols() != xv.rows() || xv.cols() != 1) shape_error("matvec", av, xv);
  return push({av * xv, OpKind::MatVec, {a, x}, 0.0});
}

NodeId Graph::add(NodeId x, NodeId y) {
  const Matrix& xv = value(x);
  const Matrix& yv = value(y);
  if (xv.rows() != yv.rows() || xv.cols() != yv.cols()) shape_error("add", xv, yv);
  return push({xv + yv, OpKind::Add, {x, y}, 0.0});
}

NodeId Graph::sub(NodeId x, NodeId y) {
  const Matrix& xv = value(x);
  const Matrix& yv = value(y);
  if (xv.rows() != yv.rows() || xv.cols() != yv.cols()) shape_error("sub", xv, yv);
  return push({xv - yv, OpKind::Sub, {x, y}, 0.0});
}

NodeId Graph::scale(NodeId x, double c) {
  return push({c * value(x), OpKind::Scale, {x, -1}, c});
}

NodeId Graph::relu(NodeId x) {
  return push({value(x).cwiseMax(0.0), OpKind::Relu, {x, -1}, 0.0});
}

NodeId Graph::rmsnorm(NodeId x, double epsilon) {
  const Matrix& xv = value(x);
  if (xv.size() == 0) throw std::invalid_argument("rmsnorm: empty input");
  return push({xv / rms_scale(xv, epsilon), OpKind::RmsNorm, {x, -1}, epsilon});
}

NodeId Graph::stopgrad(NodeId x) {
  return push({value(x), OpKind::StopGrad, {x, -1}, 0.0});
}

NodeId Graph::outer(NodeId u, NodeId v) {
  const Matrix& uv = value(u);
  const Matrix& vv = value(v);
  if (uv.cols() != 1 || vv.cols() != 1) shape_error("outer", uv, vv);
  return push({uv * vv.transpose(), OpKind::Outer, {u, v}, 0.0});
}

NodeId Graph::squared_norm(NodeId x) {
  Matrix s(1, 1);
  s(0, 0) = value(x).squaredNorm();
  return push({s, OpKind::SquaredNorm, {x, -1}, 0.0});
}

std::vector<Matrix> Graph::backward(NodeId root) const {
  const Matrix& rv = value(root);
  if (rv.rows() != 1 || rv.cols() != 1) {
    std::ostringstream msg;
    msg << "backward: root must be scalar, got " << rv.rows() << "x" << rv.cols();
    throw std::invalid_argument(msg.str());
  }

  std::vector<Matrix> grads(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) grads[i] = Matrix::Zero(nodes_[i].value.rows(), nodes_[i].value.cols());
  grads[static_cast<size_t>(root)](0, 0) = 1.0;

  for (NodeId id = static_cast<NodeId>(nodes_.size()) - 1; id >= 0; --id) {
    const GraphNode& n = node(id);
    const Matrix& g = grads[static_cast<size_t>(id)];
    switch (n.op) {
      case OpKind::Constant:
      case OpKind::Parameter:
        break;
      case OpKind::MatVec: {
        const Matrix& av = value(n.parents[0]);
        const Matrix& xv = value(n.parents[1]);
        grads[static_cast<size_t>(n.parents[0])] += g * xv.transpose();
        grads[static_cast<size_t>(n.parents[1])] += av.transpose() * g;
        break;
      }
      case OpKind::Add:
        grads[static_cast<size_t>(n.parents[0])] += g;
        grads[static_cast<size_t>(n.parents[1])] += g;
        break;
      case OpKind::Sub:
        grads[static_cast<size_t>(n.parents[0])] += g;
        grads[static_cast<size_t>(n.parents[1])] -= g;
        break;
      case OpKind::Scale:
        grads[static_cast<size_t>(n.parents[0])] += n.coeff * g;
        break;
      case OpKind::Relu: {
        // Subgradient at exactly 0 is 0.
        const Matrix& xv = value(n.parents[0]);
        grads[static_cast<size_t>(n.parents[0])] +=
            (xv.array() > 0.0).cast<double>().matrix().cwiseProduct(g);
        break;
      }
      case OpKind::RmsNorm: {
        const Matrix& xv = value(n.parents[0]);
        const double s = rms_scale(xv, n.coeff);
        const double dot = (xv.array() * g.array()).sum();
        const double nsize = static_cast<double>(xv.size());
        grads[static_cast<size_t>(n.parents[0])] += g / s - xv * (dot / (nsize * s * s * s));
        break;
      }
      case OpKind::StopGrad:
        break;
      case OpKind::Outer: {
        const Matrix& uv = value(n.parents[0]);
        const Matrix& vv = value(n.parents[1]);
        grads[static_cast<size_t>(n.parents[0])] += g * vv;
        grads[static_cast<size_t>(n.parents[1])] += g.transpose() * uv;
        break;
      }
      case OpKind::SquaredNorm:
        grads[static_cast<size_t>(n.parents[0])] += 2.0 * g(0, 0) * value(n.parents[0]);
        break;
    }
  }
  return grads;
}

}  // namespace interactivity::autodiff
