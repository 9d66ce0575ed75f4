#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "quadest/cutplane.hpp"
#include "quadest/error.hpp"
#include "quadest/metrics.hpp"

using namespace quadest;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

// Midpoint rule for the integral form of the tightness ratio in 1D.
double riemann_metric(const Expression& f, const QuadraticUnderestimator& q, double lo, double hi, int n) {
  double num = 0.0, den = 0.0;
  const double h = (hi - lo) / n;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x = vec({lo + (i + 0.5) * h});
    const double l = q.linear(x);
    num += q.eval(x) - l;
    den += f.eval(x) - l;
  }
  return num / den;
}

}  // namespace

TEST_CASE("one point per stratum in one dimension") {
  auto pts = latin_hypercube(4, BoxDomain(vec({0}), vec({1})), 9);
  REQUIRE(pts.size() == 4);
  std::set<int> cells;
  for (const auto& p : pts) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] <= 1.0);
    cells.insert(std::min(3, static_cast<int>(p[0] * 4)));
  }
  CHECK(cells.size() == 4);
}

TEST_CASE("every axis projection is stratified") {
  BoxDomain box(vec({-1, 2, 10, 0}), vec({1, 3, 20, 1e-3}));
  const int n = 37;
  auto pts = latin_hypercube(n, box, 123);
  for (int i = 0; i < box.dim(); ++i) {
    std::set<int> cells;
    for (const auto& p : pts) {
      const double u = (p[i] - box.lower(i)) / (box.upper(i) - box.lower(i));
      cells.insert(std::min(n - 1, static_cast<int>(u * n)));
    }
    CHECK(static_cast<int>(cells.size()) == n);
  }
}

TEST_CASE("fixed seeds reproduce, different seeds differ") {
  BoxDomain box(vec({0, 0}), vec({1, 1}));
  auto a = latin_hypercube(20, box, 5);
  auto b = latin_hypercube(20, box, 5);
  auto c = latin_hypercube(20, box, 6);
  for (int k = 0; k < 20; ++k) CHECK(a[k] == b[k]);
  bool differ = false;
  for (int k = 0; k < 20; ++k) differ = differ || a[k] != c[k];
  CHECK(differ);
  CHECK_THROWS_AS(latin_hypercube(0, box, 1), ValidationError);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("metric extremes") {
  BoxDomain box(vec({-1, -1}), vec({1, 1}));
  Expression f = Expression::parse("exp(x0 + x1)", 2);
  auto q = QuadraticUnderestimator::build(f, vec({0.2, 0.1}));
  q.set_alpha(0.0);
  auto zero = tightness(f, q, box, 1);
  CHECK(zero.metric == 0.0);
  CHECK(zero.n_samples == 200);

  Expression sq = Expression::parse("x0^2 + x1^2 + x0*x1", 2);
  auto qs = QuadraticUnderestimator::build(sq, vec({0.5, 0.5}));
  CHECK(tightness(sq, qs, box, 1).metric == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flat functions report a metric of one") {
  BoxDomain box(vec({0}), vec({1}));
  Expression f = Expression::parse("2*x0 + 1", 1);
  QuadraticUnderestimator q(vec({0.5}), 2.0, vec({2.0}), Eigen::MatrixXd::Zero(1, 1));
  auto r = tightness(f, q, box, 3);
  CHECK(r.flat);
  CHECK(r.metric == 1.0);
}

TEST_CASE("exponential metric agrees with dense quadrature") {
  ProblemInstance inst{Expression::parse("exp(x0)", 1), BoxDomain(vec({-1}), vec({1})), vec({1}), {}, 1.0};
  inst.scaling = scale(inst.f, inst.box).factor;
  RunResult r = run(inst);
  auto q = final_underestimator(inst, r);
  const double mc = tightness(inst.f, q, inst.box, 17).metric;
  const double exact = riemann_metric(inst.f, q, -1.0, 1.0, 1000000);
  CHECK(std::fabs(mc - exact) <= 0.01);
}

TEST_CASE("metric is invariant under scaling and monotone in alpha") {
  BoxDomain box(vec({0, 0}), vec({1, 1}));
  Expression f = Expression::parse("exp(0.5*x0^2 + x1^2 + 0.25*x0 + 0.25*x1 + 1)", 2);
  Expression g = Expression::parse("0.001*exp(0.5*x0^2 + x1^2 + 0.25*x0 + 0.25*x1 + 1)", 2);
  auto qf = QuadraticUnderestimator::build(f, vec({1, 1}));
  auto qg = QuadraticUnderestimator::build(g, vec({1, 1}));
  qf.set_alpha(0.35);
  qg.set_alpha(0.35);
  CHECK(std::fabs(tightness(f, qf, box, 8).metric - tightness(g, qg, box, 8).metric) <= 1e-9);
  double prev = -1.0;
  for (double a = 0.0; a <= 1.0; a += 0.1) {
    qf.set_alpha(std::min(a, 1.0));
    const double m = tightness(f, qf, box, 8).metric;
    CHECK(m >= prev);
    prev = m;
  }
}
