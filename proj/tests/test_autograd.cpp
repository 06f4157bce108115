#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "argen/autograd.hpp"

using namespace argen;
using ad::Matrix;
using ad::Var;

namespace {

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 0.5) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

/// Central finite differences on every coordinate of every parameter.
void check_gradients(std::vector<Var> params, const std::function<Var()>& loss_fn,
                     double step = 1e-6, double tol = 1e-6) {
  for (auto& p : params) p.zero_grad();
  Var loss = loss_fn();
  loss.backward();
  for (auto& p : params) {
    REQUIRE(p.has_grad());
    Matrix analytic = p.grad();
    for (Eigen::Index i = 0; i < p.value().rows(); ++i) {
      for (Eigen::Index j = 0; j < p.value().cols(); ++j) {
        double saved = p.value()(i, j);
        p.mutable_value()(i, j) = saved + step;
        double up = loss_fn().value()(0, 0);
        p.mutable_value()(i, j) = saved - step;
        double down = loss_fn().value()(0, 0);
        p.mutable_value()(i, j) = saved;
        double numeric = (up - down) / (2.0 * step);
        double denom = std::max({std::abs(numeric), std::abs(analytic(i, j)), 1e-8});
        CHECK(std::abs(numeric - analytic(i, j)) / denom < tol);
      }
    }
  }
}

}  // namespace

TEST_CASE("matmul chain gradients match finite differences") {
  std::mt19937_64 rng(1);
  Var a = Var::parameter(random_matrix(rng, 3, 4));
  Var b = Var::parameter(random_matrix(rng, 4, 2));
  check_gradients({a, b}, [&] { return ad::sum_all(ad::matmul(a, b)); });
}

TEST_CASE("elementwise and broadcast op gradients") {
  std::mt19937_64 rng(2);
  Var a = Var::parameter(random_matrix(rng, 3, 5));
  Var b = Var::parameter(random_matrix(rng, 3, 5));
  Var bias = Var::parameter(random_matrix(rng, 1, 5));
  Var w = Var::parameter(random_matrix(rng, 3, 1));
  check_gradients({a, b, bias, w}, [&] {
    Var x = ad::mul(ad::add(a, b), ad::sub(a, b));
    x = ad::add_rowvector(x, bias);
    x = ad::rowwise_scale(x, w);
    return ad::sum_all(x);
  });
}

TEST_CASE("softmax/log/sigmoid/gelu gradients") {
  std::mt19937_64 rng(3);
  Var a = Var::parameter(random_matrix(rng, 4, 6));
  check_gradients({a}, [&] {
    Var p = ad::softmax_rows(a);
    return ad::sum_all(ad::mul(p, ad::log_elem(ad::add_scalar(p, 1e-9))));
  });
  Var b = Var::parameter(random_matrix(rng, 2, 7));
  check_gradients({b}, [&] { return ad::sum_all(ad::sigmoid(b)); });
  Var c = Var::parameter(random_matrix(rng, 2, 7));
  check_gradients({c}, [&] { return ad::sum_all(ad::gelu(c)); });
}

TEST_CASE("layer norm gradients") {
  std::mt19937_64 rng(4);
  Var x = Var::parameter(random_matrix(rng, 3, 8));
  Var g = Var::parameter(random_matrix(rng, 1, 8, 0.2));
  Var b = Var::parameter(random_matrix(rng, 1, 8, 0.2));
  check_gradients({x, g, b}, [&] {
    Var y = ad::layer_norm_rows(x, g, b);
    return ad::sum_all(ad::mul(y, y));
  }, 1e-6, 1e-5);
}

TEST_CASE("gather and scatter gradients") {
  std::mt19937_64 rng(5);
  Var table = Var::parameter(random_matrix(rng, 6, 4));
  std::vector<int> ids{2, 2, 0, 5};
  check_gradients({table}, [&] {
    Var rows = ad::gather_rows(table, ids);
    return ad::sum_all(ad::mul(rows, rows));
  });

  Var attn = Var::parameter(random_matrix(rng, 3, 5));
  std::vector<int> col_map{7, 1, 7, 0, 3};
  check_gradients({attn}, [&] {
    Var scattered = ad::scatter_cols(ad::softmax_rows(attn), col_map, 9);
    return ad::sum_all(ad::mul(scattered, scattered));
  });

  Var m = Var::parameter(random_matrix(rng, 4, 5));
  std::vector<int> picks{1, 0, 4, 2};
  check_gradients({m}, [&] {
    Var picked = ad::gather_cols_per_row(m, picks);
    return ad::sum_all(ad::mul(picked, picked));
  });
}

TEST_CASE("softmax rows normalize and scatter preserves mass") {
  std::mt19937_64 rng(6);
  Var a = Var::constant(random_matrix(rng, 5, 9));
  Matrix p = ad::softmax_rows(a).value();
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    CHECK(std::abs(p.row(i).sum() - 1.0) < 1e-12);

  std::vector<int> col_map{0, 3, 3, 1, 0, 2, 4, 4, 2};
  Matrix s = ad::scatter_cols(ad::softmax_rows(a), col_map, 6).value();
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    CHECK(std::abs(s.row(i).sum() - 1.0) < 1e-12);
}

TEST_CASE("grad accumulates across repeated use of one node") {
  Var x = Var::parameter(Matrix::Constant(1, 1, 3.0));
  Var y = ad::mul(x, x);  // x^2, dy/dx = 2x = 6
  y.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("Adam minimizes a quadratic") {
  ad::ParameterStore store;
  Var x = store.add("x", Matrix::Constant(1, 1, 5.0));
  ad::AdamOptimizer opt(store, 0.1);
  for (int i = 0; i < 300; ++i) {
    opt.zero_grad();
    Var loss = ad::sum_all(ad::mul(x, x));
    loss.backward();
    opt.step();
  }
  CHECK(std::abs(x.value()(0, 0)) < 1e-2);
}

TEST_CASE("parameter store rejects duplicates and lists sizes") {
  ad::ParameterStore store;
  store.add("a", Matrix::Zero(2, 3));
  store.add("b", Matrix::Zero(1, 4));
  CHECK_THROWS(store.add("a", Matrix::Zero(1, 1)));
  CHECK(store.parameter_count() == 10);
  CHECK(store.has("b"));
  CHECK_FALSE(store.has("c"));
}
