#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace argen::ad {

using Matrix = Eigen::MatrixXd;

/// One node of the dynamically built computation graph.
struct Node {
  Matrix value;
  Matrix grad;  // allocated on first accumulation
  bool requires_grad = false;
  long order = 0;  // creation stamp, defines a valid topological order
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  void accumulate(const Matrix& g);
};

/// Value-semantics handle to a graph node. Graphs are built per forward pass
/// and freed when the last handle goes away.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Var constant(Matrix value);
  static Var parameter(Matrix value);

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  const Matrix& grad() const { return node_->grad; }
  bool has_grad() const { return node_->grad.size() > 0; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  void zero_grad() { node_->grad.resize(0, 0); }

  /// Reverse-mode sweep from this scalar (1x1) node.
  void backward() const;

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// ---- graph ops -----------------------------------------------------------

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);  // elementwise
Var scale(const Var& a, double c);
Var add_scalar(const Var& a, double c);

/// y(i, :) = a(i, :) + bias(0, :)
Var add_rowvector(const Var& a, const Var& bias);
/// y(i, j) = a(i, j) * w(i, 0)
Var rowwise_scale(const Var& a, const Var& w);

Var softmax_rows(const Var& a);
Var log_elem(const Var& a);
Var sigmoid(const Var& a);
Var gelu(const Var& a);
Var layer_norm_rows(const Var& x, const Var& gain, const Var& bias,
                    double eps = 1e-5);

/// y = table(ids, :), one row per id; gradient scatters back into the table.
Var gather_rows(const Var& table, const std::vector<int>& ids);
/// y(i, 0) = a(i, ids[i])
Var gather_cols_per_row(const Var& a, const std::vector<int>& ids);
/// out(i, col_map[j]) += a(i, j), out has `num_cols` columns.
Var scatter_cols(const Var& a, const std::vector<int>& col_map, int num_cols);

Var sum_all(const Var& a);  // 1x1
Var mean_rows_dot(const Var& a, const Var& b);  // used by tests

// ---- parameters and optimizer --------------------------------------------

/// Named, persistent trainable tensors.
class ParameterStore {
 public:
  Var add(const std::string& name, Matrix init);
  Var get(const std::string& name) const;
  bool has(const std::string& name) const;
  const std::vector<std::pair<std::string, Var>>& all() const { return params_; }
  std::size_t parameter_count() const;
  void zero_grad();

 private:
  std::vector<std::pair<std::string, Var>> params_;
};

/// Adam with bias correction.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(ParameterStore& params, double lr = 1e-4,
                         double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);
  void step();
  void zero_grad();
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  ParameterStore& params_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

}  // namespace argen::ad
