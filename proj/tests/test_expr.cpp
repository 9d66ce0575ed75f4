#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "quadest/benchlib.hpp"
#include "quadest/error.hpp"
#include "quadest/expr.hpp"
#include "quadest/metrics.hpp"

using quadest::DomainError;
using quadest::Expression;
using quadest::Op;
using quadest::ParseError;
using quadest::ValidationError;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

}  // namespace

TEST_CASE("sum of squares parses to add of two powers") {
  Expression f = Expression::parse("x0^2 + x1^2", 2);
  const auto& nodes = f.nodes();
  const auto& root = nodes[f.root()];
  CHECK(root.op == Op::kAdd);
  CHECK(nodes[root.lhs].op == Op::kPow);
  CHECK(nodes[root.rhs].op == Op::kPow);
  CHECK(nodes[nodes[root.lhs].lhs].op == Op::kVar);
  CHECK(nodes[nodes[root.lhs].rhs].value == 2.0);
  CHECK(f.eval(vec({1, 1})) == 2.0);
}

TEST_CASE("evaluation examples") {
  CHECK(Expression::parse("-x0^0.5", 1).eval(vec({4})) == doctest::Approx(-2.0));
  CHECK(Expression::parse("exp(x0)", 1).eval(vec({0})) == 1.0);
  CHECK(Expression::parse("-0.065*log(x0)", 1).eval(vec({std::exp(1.0)})) == doctest::Approx(-0.065));
  Expression g = Expression::parse("exp(0.5*x0^2 + x1^2 + 0.25*x0 + 0.25*x1 + 1)", 2);
  CHECK(g.eval(vec({1, 1})) == doctest::Approx(std::exp(3.0)));
}

TEST_CASE("precedence and associativity") {
  CHECK(Expression::parse("2^3^2", 0).eval(Eigen::VectorXd()) == doctest::Approx(512.0));
  CHECK(Expression::parse("-x0^2", 1).eval(vec({3})) == -9.0);
  CHECK(Expression::parse("1 - 2 - 3", 0).eval(Eigen::VectorXd()) == -4.0);
  CHECK(Expression::parse("8 / 4 / 2", 0).eval(Eigen::VectorXd()) == 1.0);
  CHECK(Expression::parse("2 + 3*4", 0).eval(Eigen::VectorXd()) == 14.0);
  CHECK(Expression::parse("x0^-1", 1).eval(vec({4})) == 0.25);
  CHECK(Expression::parse("1.5e1 + 2E-1", 0).eval(Eigen::VectorXd()) == doctest::Approx(15.2));
}

TEST_CASE("parameters bind as constants") {
  quadest::ParameterMap p{{"a", 0.5}, {"b", 3.0}};
  Expression f = Expression::parse("a*x0^b", 1, p);
  CHECK(f.eval(vec({2})) == 4.0);
  Expression g = Expression::parse("a^(x0 + x1)", 2, {{"a", 2.0}});
  CHECK(g.eval(vec({1, 2})) == doctest::Approx(8.0));
  CHECK(g.grad(vec({1, 2}))[0] == doctest::Approx(8.0 * std::log(2.0)));
}

TEST_CASE("syntax errors carry a position") {
  try {
    (void)Expression::parse("x0 + * x1", 2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
  CHECK_THROWS_AS((void)Expression::parse("x0 +", 1), ParseError);
  CHECK_THROWS_AS((void)Expression::parse("(x0", 1), ParseError);
  CHECK_THROWS_AS((void)Expression::parse("x0 x0", 1), ParseError);
  CHECK_THROWS_AS((void)Expression::parse("", 1), ParseError);
}

TEST_CASE("unknown identifiers and out of range variables are rejected") {
  CHECK_THROWS_AS((void)Expression::parse("y + 1", 1), ParseError);
  CHECK_THROWS_AS((void)Expression::parse("sin(x0)", 1), ParseError);
  CHECK_THROWS_AS((void)Expression::parse("x2", 2), ParseError);
  CHECK_THROWS_AS((void)Expression::parse("x0^x1", 2), ParseError);
}

TEST_CASE("domain violations raise instead of returning NaN") {
  CHECK_THROWS_AS((void)Expression::parse("log(x0)", 1).eval(vec({0})), DomainError);
  CHECK_THROWS_AS((void)Expression::parse("log(x0)", 1).eval(vec({-1})), DomainError);
  CHECK_THROWS_AS((void)Expression::parse("sqrt(x0)", 1).eval(vec({-1})), DomainError);
  CHECK_THROWS_AS((void)Expression::parse("1/x0", 1).eval(vec({0})), DomainError);
  CHECK_THROWS_AS((void)Expression::parse("x0^0.5", 1).eval(vec({-1})), DomainError);
  CHECK_THROWS_AS((void)Expression::parse("exp(x0)", 1).eval(vec({1000})), DomainError);
  CHECK(Expression::parse("x0^3", 1).eval(vec({-2})) == -8.0);
}

TEST_CASE("wrong point dimension is a validation error") {
  CHECK_THROWS_AS((void)Expression::parse("x0", 2).eval(vec({1})), ValidationError);
}

TEST_CASE("gradient examples") {
  Expression f = Expression::parse("x0^2 + x1^2", 2);
  Eigen::VectorXd g = f.grad(vec({1, 2}));
  CHECK(g[0] == 2.0);
  CHECK(g[1] == 4.0);
  CHECK(Expression::parse("exp(x0)", 1).grad(vec({1}))[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
}

TEST_CASE("illustrative function gradient matches finite differences") {
  Expression f = Expression::parse("exp(0.5*x0^2 + x1^2 + 0.25*x0 + 0.25*x1 + 1)", 2);
  Eigen::VectorXd x = vec({1, 1});
  Eigen::VectorXd ad = f.grad(x);
  Eigen::VectorXd fd = oracle::fd_gradient(f, x);
  for (int i = 0; i < 2; ++i) CHECK(std::fabs(ad[i] - fd[i]) <= 1e-6 * std::fabs(ad[i]));
  // Closed form: grad = f * (x0 + 1/4, 2 x1 + 1/4).
  CHECK(ad[0] == doctest::Approx(std::exp(3.0) * 1.25).epsilon(1e-14));
  CHECK(ad[1] == doctest::Approx(std::exp(3.0) * 2.25).epsilon(1e-14));
}

TEST_CASE("hessian examples") {
  Eigen::MatrixXd h = Expression::parse("x0^2 + x1^2", 2).hessian(vec({0.3, -0.7}));
  CHECK(h(0, 0) == 2.0);
  CHECK(h(1, 1) == 2.0);
  CHECK(h(0, 1) == 0.0);
  Eigen::MatrixXd r = Expression::parse("x0^2 + x1^2 + 2*x0*x1", 2).hessian(vec({0.1, 0.4}));
  CHECK(r(0, 0) == 2.0);
  CHECK(r(0, 1) == 2.0);
  CHECK(r(1, 0) == 2.0);
  CHECK(r(1, 1) == 2.0);
  CHECK(Expression::parse("x0^4", 1).hessian(vec({0.5}))(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("second order sweep agrees with the separate entry points") {
  Expression f = Expression::parse("(x0*x1 + 1)/sqrt(x0 + 2) - log(x1)", 2);
  Eigen::VectorXd x = vec({0.7, 1.3});
  quadest::SecondOrder so = f.second_order(x);
  CHECK(so.value == f.eval(x));
  CHECK((so.grad - f.grad(x)).norm() == 0.0);
  CHECK((so.hessian - f.hessian(x)).norm() == 0.0);
  CHECK((so.hessian - so.hessian.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("corpus expressions round trip through printing") {
  for (const auto& e : quadest::load_corpus()) {
    CAPTURE(e.name);
    Expression back = Expression::parse(e.f.to_string(), e.dimension);
    CHECK(back.structurally_equal(e.f));
    CHECK(back.to_string() == e.f.to_string());
  }
}

TEST_CASE("corpus hessians are symmetric, PSD and match differences of the gradient") {
  for (const auto& e : quadest::load_corpus()) {
    CAPTURE(e.name);
    const auto inner = oracle::shrink(e.box, 1e-3);
    for (const auto& x : quadest::latin_hypercube(100, inner, 7)) {
      Eigen::MatrixXd h = e.f.hessian(x);
      CHECK((h - h.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + h.cwiseAbs().maxCoeff()));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      CHECK(es.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, h.norm()));
    }
  }
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.774245779798168}) {
    Expression c = Expression::parse(quadest::format_double(v), 0);
    CHECK(c.eval(Eigen::VectorXd()) == v);
  }
}
