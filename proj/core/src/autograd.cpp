#include "argen/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace argen::ad {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

long next_order() {
  static long counter = 0;
  return ++counter;
}

std::shared_ptr<Node> make_node(Matrix value, std::vector<std::shared_ptr<Node>> parents,
                                std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->order = next_order();
  node->requires_grad = false;
  for (const auto& p : parents)
    if (p->requires_grad) node->requires_grad = true;
  if (node->requires_grad) {
    node->parents = std::move(parents);
    node->backward_fn = std::move(backward_fn);
  }
  return node;
}

void check_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.value().rows() != b.value().rows() || a.value().cols() != b.value().cols())
    throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                                std::to_string(a.value().rows()) + "x" +
                                std::to_string(a.value().cols()) + " vs " +
                                std::to_string(b.value().rows()) + "x" +
                                std::to_string(b.value().cols()) + ")");
}

}  // namespace

void Node::accumulate(const Matrix& g) {
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

Var Var::constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->order = next_order();
  node->requires_grad = false;
  return Var(node);
}

Var Var::parameter(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->order = next_order();
  node->requires_grad = true;
  return Var(node);
}

void Var::backward() const {
  if (!node_) throw std::runtime_error("backward: undefined variable");
  if (node_->value.size() != 1)
    throw std::runtime_error("backward: root must be scalar (1x1)");

  // Collect the reachable subgraph, then run in reverse creation order.
  std::vector<Node*> nodes;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{node_.get()};
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    nodes.push_back(n);
    for (const auto& p : n->parents) stack.push_back(p.get());
  }
  std::sort(nodes.begin(), nodes.end(),
            [](Node* a, Node* b) { return a->order > b->order; });

  node_->accumulate(Matrix::Ones(1, 1));
  for (Node* n : nodes) {
    if (n->backward_fn && n->grad.size() > 0) n->backward_fn(*n);
  }
}

Var matmul(const Var& a, const Var& b) {
  if (a.value().cols() != b.value().rows())
    throw std::invalid_argument("matmul: inner dimension mismatch");
  auto an = a.node();
  auto bn = b.node();
  return Var(make_node(a.value() * b.value(), {an, bn}, [an, bn](Node& n) {
    if (an->requires_grad) an->accumulate(n.grad * bn->value.transpose());
    if (bn->requires_grad) bn->accumulate(an->value.transpose() * n.grad);
  }));
}

Var transpose(const Var& a) {
  auto an = a.node();
  return Var(make_node(a.value().transpose(), {an}, [an](Node& n) {
    an->accumulate(n.grad.transpose());
  }));
}

Var add(const Var& a, const Var& b) {
  check_same_shape(a, b, "add");
  auto an = a.node();
  auto bn = b.node();
  return Var(make_node(a.value() + b.value(), {an, bn}, [an, bn](Node& n) {
    if (an->requires_grad) an->accumulate(n.grad);
    if (bn->requires_grad) bn->accumulate(n.grad);
  }));
}

Var sub(const Var& a, const Var& b) {
  check_same_shape(a, b, "sub");
  auto an = a.node();
  auto bn = b.node();
  return Var(make_node(a.value() - b.value(), {an, bn}, [an, bn](Node& n) {
    if (an->requires_grad) an->accumulate(n.grad);
    if (bn->requires_grad) bn->accumulate(-n.grad);
  }));
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a, b, "mul");
  auto an = a.node();
  auto bn = b.node();
  return Var(make_node(a.value().cwiseProduct(b.value()), {an, bn},
                       [an, bn](Node& n) {
                         if (an->requires_grad)
                           an->accumulate(n.grad.cwiseProduct(bn->value));
                         if (bn->requires_grad)
                           bn->accumulate(n.grad.cwiseProduct(an->value));
                       }));
}

Var scale(const Var& a, double c) {
  auto an = a.node();
  return Var(make_node(a.value() * c, {an},
                       [an, c](Node& n) { an->accumulate(n.grad * c); }));
}

Var add_scalar(const Var& a, double c) {
  auto an = a.node();
  return Var(make_node(a.value().array() + c, {an},
                       [an](Node& n) { an->accumulate(n.grad); }));
}

Var add_rowvector(const Var& a, const Var& bias) {
  if (bias.value().rows() != 1 || bias.value().cols() != a.value().cols())
    throw std::invalid_argument("add_rowvector: bias must be 1 x cols(a)");
  auto an = a.node();
  auto bn = bias.node();
  Matrix out = a.value();
  out.rowwise() += bias.value().row(0);
  return Var(make_node(std::move(out), {an, bn}, [an, bn](Node& n) {
    if (an->requires_grad) an->accumulate(n.grad);
    if (bn->requires_grad) bn->accumulate(n.grad.colwise().sum());
  }));
}

Var rowwise_scale(const Var& a, const Var& w) {
  if (w.value().cols() != 1 || w.value().rows() != a.value().rows())
    throw std::invalid_argument("rowwise_scale: w must be rows(a) x 1");
  auto an = a.node();
  auto wn = w.node();
  Matrix out = a.value().array().colwise() * w.value().col(0).array();
  return Var(make_node(std::move(out), {an, wn}, [an, wn](Node& n) {
    if (an->requires_grad)
      an->accumulate(n.grad.array().colwise() * wn->value.col(0).array());
    if (wn->requires_grad)
      wn->accumulate(n.grad.cwiseProduct(an->value).rowwise().sum());
  }));
}

Var softmax_rows(const Var& a) {
  Matrix out = a.value();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double mx = out.row(i).maxCoeff();
    out.row(i) = (out.row(i).array() - mx).exp();
    out.row(i) /= out.row(i).sum();
  }
  auto an = a.node();
  auto on = make_node(std::move(out), {an}, nullptr);
  std::weak_ptr<Node> self = on;
  if (on->requires_grad) {
    on->backward_fn = [an, self](Node& n) {
      auto y = self.lock();
      Matrix dx = n.grad;
      for (Eigen::Index i = 0; i < dx.rows(); ++i) {
        double dot = n.grad.row(i).dot(y->value.row(i));
        dx.row(i) = (n.grad.row(i).array() - dot) * y->value.row(i).array();
      }
      an->accumulate(dx);
    };
  }
  return Var(on);
}

Var log_elem(const Var& a) {
  auto an = a.node();
  return Var(make_node(a.value().array().log(), {an}, [an](Node& n) {
    an->accumulate(n.grad.cwiseQuotient(an->value));
  }));
}

Var sigmoid(const Var& a) {
  Matrix out = (1.0 / (1.0 + (-a.value().array()).exp()));
  auto an = a.node();
  auto on = make_node(std::move(out), {an}, nullptr);
  std::weak_ptr<Node> self = on;
  if (on->requires_grad) {
    on->backward_fn = [an, self](Node& n) {
      auto y = self.lock();
      an->accumulate(
          (n.grad.array() * y->value.array() * (1.0 - y->value.array())).matrix());
    };
  }
  return Var(on);
}

Var gelu(const Var& a) {
  Matrix out = a.value().unaryExpr(
      [](double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); });
  auto an = a.node();
  return Var(make_node(std::move(out), {an}, [an](Node& n) {
    Matrix d = an->value.unaryExpr([](double x) {
      double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
      double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      return cdf + x * pdf;
    });
    an->accumulate(n.grad.cwiseProduct(d));
  }));
}

Var layer_norm_rows(const Var& x, const Var& gain, const Var& bias, double eps) {
  const Matrix& xv = x.value();
  Eigen::Index rows = xv.rows(), cols = xv.cols();
  if (gain.value().rows() != 1 || gain.value().cols() != cols ||
      bias.value().rows() != 1 || bias.value().cols() != cols)
    throw std::invalid_argument("layer_norm_rows: gain/bias must be 1 x cols");

  Matrix xhat(rows, cols);
  Eigen::VectorXd inv_std(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double mu = xv.row(i).mean();
    double var = (xv.row(i).array() - mu).square().mean();
    inv_std(i) = 1.0 / std::sqrt(var + eps);
    xhat.row(i) = (xv.row(i).array() - mu) * inv_std(i);
  }
  Matrix out = (xhat.array().rowwise() * gain.value().row(0).array()).matrix();
  out.rowwise() += bias.value().row(0);

  auto xn = x.node();
  auto gn = gain.node();
  auto bn = bias.node();
  return Var(make_node(
      std::move(out), {xn, gn, bn},
      [xn, gn, bn, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& n) {
        if (gn->requires_grad)
          gn->accumulate(n.grad.cwiseProduct(xhat).colwise().sum());
        if (bn->requires_grad) bn->accumulate(n.grad.colwise().sum());
        if (xn->requires_grad) {
          Matrix dxhat =
              (n.grad.array().rowwise() * gn->value.row(0).array()).matrix();
          Matrix dx(dxhat.rows(), dxhat.cols());
          for (Eigen::Index i = 0; i < dxhat.rows(); ++i) {
            double m1 = dxhat.row(i).mean();
            double m2 = dxhat.row(i).cwiseProduct(xhat.row(i)).mean();
            dx.row(i) =
                inv_std(i) *
                (dxhat.row(i).array() - m1 - xhat.row(i).array() * m2);
          }
          xn->accumulate(dx);
        }
      }));
}

Var gather_rows(const Var& table, const std::vector<int>& ids) {
  const Matrix& tv = table.value();
  Matrix out(static_cast<Eigen::Index>(ids.size()), tv.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= tv.rows())
      throw std::out_of_range("gather_rows: id " + std::to_string(ids[i]));
    out.row(static_cast<Eigen::Index>(i)) = tv.row(ids[i]);
  }
  auto tn = table.node();
  return Var(make_node(std::move(out), {tn}, [tn, ids](Node& n) {
    Matrix g = Matrix::Zero(tn->value.rows(), tn->value.cols());
    for (std::size_t i = 0; i < ids.size(); ++i)
      g.row(ids[i]) += n.grad.row(static_cast<Eigen::Index>(i));
    tn->accumulate(g);
  }));
}

Var gather_cols_per_row(const Var& a, const std::vector<int>& ids) {
  const Matrix& av = a.value();
  if (static_cast<Eigen::Index>(ids.size()) != av.rows())
    throw std::invalid_argument("gather_cols_per_row: one id per row required");
  Matrix out(av.rows(), 1);
  for (Eigen::Index i = 0; i < av.rows(); ++i) {
    int j = ids[static_cast<std::size_t>(i)];
    if (j < 0 || j >= av.cols())
      throw std::out_of_range("gather_cols_per_row: id " + std::to_string(j));
    out(i, 0) = av(i, j);
  }
  auto an = a.node();
  return Var(make_node(std::move(out), {an}, [an, ids](Node& n) {
    Matrix g = Matrix::Zero(an->value.rows(), an->value.cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      g(i, ids[static_cast<std::size_t>(i)]) += n.grad(i, 0);
    an->accumulate(g);
  }));
}

Var scatter_cols(const Var& a, const std::vector<int>& col_map, int num_cols) {
  const Matrix& av = a.value();
  if (static_cast<Eigen::Index>(col_map.size()) != av.cols())
    throw std::invalid_argument("scatter_cols: one target column per source column");
  Matrix out = Matrix::Zero(av.rows(), num_cols);
  for (Eigen::Index j = 0; j < av.cols(); ++j) {
    int c = col_map[static_cast<std::size_t>(j)];
    if (c < 0 || c >= num_cols)
      throw std::out_of_range("scatter_cols: target column " + std::to_string(c));
    out.col(c) += av.col(j);
  }
  auto an = a.node();
  return Var(make_node(std::move(out), {an}, [an, col_map](Node& n) {
    Matrix g(an->value.rows(), an->value.cols());
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      g.col(j) = n.grad.col(col_map[static_cast<std::size_t>(j)]);
    an->accumulate(g);
  }));
}

Var sum_all(const Var& a) {
  auto an = a.node();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return Var(make_node(std::move(out), {an}, [an](Node& n) {
    an->accumulate(Matrix::Constant(an->value.rows(), an->value.cols(),
                                    n.grad(0, 0)));
  }));
}

Var mean_rows_dot(const Var& a, const Var& b) {
  check_same_shape(a, b, "mean_rows_dot");
  return scale(sum_all(mul(a, b)), 1.0 / static_cast<double>(a.value().rows()));
}

// ---- ParameterStore / Adam -------------------------------------------------

Var ParameterStore::add(const std::string& name, Matrix init) {
  if (has(name)) throw std::runtime_error("parameter already defined: " + name);
  Var v = Var::parameter(std::move(init));
  params_.emplace_back(name, v);
  return v;
}

Var ParameterStore::get(const std::string& name) const {
  for (const auto& [n, v] : params_)
    if (n == name) return v;
  throw std::runtime_error("unknown parameter: " + name);
}

bool ParameterStore::has(const std::string& name) const {
  for (const auto& [n, v] : params_)
    if (n == name) return true;
  return false;
}

std::size_t ParameterStore::parameter_count() const {
  std::size_t total = 0;
  for (const auto& [n, v] : params_) total += static_cast<std::size_t>(v.value().size());
  return total;
}

void ParameterStore::zero_grad() {
  for (auto& [n, v] : params_) v.zero_grad();
}

AdamOptimizer::AdamOptimizer(ParameterStore& params, double lr, double beta1,
                             double beta2, double eps)
    : params_(params), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& [name, v] : params_.all()) {
    m_.emplace_back(Matrix::Zero(v.value().rows(), v.value().cols()));
    v_.emplace_back(Matrix::Zero(v.value().rows(), v.value().cols()));
  }
}

void AdamOptimizer::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  const auto& all = params_.all();
  for (std::size_t i = 0; i < all.size(); ++i) {
    Var v = all[i].second;
    if (!v.has_grad()) continue;
    const Matrix& g = v.grad();
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    Matrix mhat = m_[i] / bc1;
    Matrix vhat = v_[i] / bc2;
    v.mutable_value().array() -=
        lr_ * mhat.array() / (vhat.array().sqrt() + eps_);
  }
}

void AdamOptimizer::zero_grad() { params_.zero_grad(); }

}  // namespace argen::ad
