#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "quadest/error.hpp"
#include "quadest/polytope.hpp"

using quadest::BoxDomain;
using quadest::CutStatus;
using quadest::Halfspace;
using quadest::Polytope;
using quadest::VertexId;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

BoxDomain unit(int d) { return BoxDomain(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)); }

std::vector<Eigen::VectorXd> points(const Polytope& p) {
  std::vector<Eigen::VectorXd> out;
  for (VertexId id : p.vertex_ids()) out.push_back(p.vertex(id).coords);
  return out;
}

// Checks the structural invariants that hold after every cut.
void check_structure(const Polytope& p) {
  const int d = p.dim();
  for (VertexId id : p.vertex_ids()) {
    const auto& v = p.vertex(id);
    CHECK(static_cast<int>(v.active.size()) == d);
    CHECK(std::is_sorted(v.active.begin(), v.active.end()));
    CHECK(static_cast<int>(v.neighbors.size()) == d);
    for (int a : v.active) {
      const Halfspace& h = p.halfspaces()[a];
      CHECK(std::fabs(h.eval(v.coords)) <= 1e-8 * (1.0 + h.normal.norm()) * (1.0 + v.coords.norm()));
    }
    for (const Halfspace& h : p.halfspaces()) CHECK(h.eval(v.coords) <= 1e-8 * (1.0 + v.coords.norm()));
    for (VertexId n : v.neighbors) {
      REQUIRE(p.contains_vertex(n));
      std::vector<int> common;
      const auto& w = p.vertex(n);
      std::set_intersection(v.active.begin(), v.active.end(), w.active.begin(), w.active.end(),
                            std::back_inserter(common));
      CHECK(static_cast<int>(common.size()) == d - 1);
    }
  }
}

}  // namespace

TEST_CASE("boxes have hypercube vertex and edge counts") {
  Polytope sq = Polytope::from_box(unit(2));
  CHECK(sq.vertex_count() == 4);
  CHECK(sq.edge_count() == 4);
  Polytope cube = Polytope::from_box(unit(3));
  CHECK(cube.vertex_count() == 8);
  CHECK(cube.edge_count() == 12);
  check_structure(cube);
  Polytope lifted = Polytope::lift(Polytope::from_box(BoxDomain(vec({-1, -1}), vec({1, 1}))), 0.0, 2.0);
  CHECK(lifted.dim() == 3);
  CHECK(lifted.vertex_count() == 8);
  CHECK(lifted.edge_count() == 12);
  check_structure(lifted);
}

TEST_CASE("degenerate boxes are rejected") {
  CHECK_THROWS_AS(BoxDomain(vec({0, 1}), vec({1, 1})), quadest::ValidationError);
  CHECK_THROWS_AS(Polytope::from_box(BoxDomain()), quadest::ValidationError);
}

TEST_CASE("cutting a corner off the square") {
  Polytope p = Polytope::from_box(unit(2));
  auto report = p.cut({vec({1, 1}), -1.5});
  REQUIRE(report.status == CutStatus::kApplied);
  REQUIRE(report.removed.size() == 1);
  CHECK(report.removed[0].coords.isApprox(vec({1, 1})));
  REQUIRE(report.created.size() == 2);
  std::vector<Eigen::VectorXd> made;
  for (VertexId id : report.created) made.push_back(p.vertex(id).coords);
  CHECK(oracle::same_point_sets(made, {vec({1, 0.5}), vec({0.5, 1})}, 1e-12));
  CHECK(p.vertex_count() == 5);
  CHECK(p.edge_count() == 5);
  check_structure(p);
}

TEST_CASE("redundant and emptying cuts leave the polytope alone") {
  Polytope p = Polytope::from_box(unit(2));
  auto red = p.cut({vec({1, 0}), -2.0});
  CHECK(red.status == CutStatus::kRedundant);
  CHECK(red.removed.empty());
  CHECK(red.created.empty());
  CHECK(p.halfspaces().size() == 4);
  auto empty = p.cut({vec({1, 0}), 5.0});
  CHECK(empty.status == CutStatus::kEmpty);
  CHECK(p.vertex_count() == 4);
  CHECK(p.halfspaces().size() == 4);
}

TEST_CASE("violating vertices follow the sign test") {
  Polytope p = Polytope::from_box(unit(2));
  CHECK(p.vertices_violating({vec({1, 0}), -2.0}).empty());
  CHECK(p.vertices_violating({vec({1, 0}), 5.0}).size() == 4);
  Halfspace mixed{vec({1, 0}), -0.5};
  auto v = p.vertices_violating(mixed);
  CHECK(v.size() == 2);
  for (VertexId id : v) CHECK(p.vertex(id).coords[0] == 1.0);
}

TEST_CASE("cube corner cut matches the subset oracle") {
  Polytope p = Polytope::from_box(unit(3));
  auto report = p.cut({vec({1, 1, 1}), -1.5});
  CHECK(report.status == CutStatus::kApplied);
  // The plane cuts six edges at their midpoints; four vertices go.
  CHECK(report.removed.size() == 4);
  CHECK(report.created.size() == 6);
  check_structure(p);
  CHECK(oracle::same_point_sets(points(p), oracle::brute_force_vertices(p.halfspaces(), 3)));
}

TEST_CASE("a cut through existing vertices is nudged into general position") {
  Polytope p = Polytope::from_box(unit(2));
  auto report = p.cut({vec({1, 1}), -1.0});  // passes through (1,0) and (0,1)
  REQUIRE(report.status == CutStatus::kApplied);
  CHECK(report.offset_shift > 0.0);
  CHECK(report.removed.size() == 3);  // (1,1) plus the two touched corners
  CHECK(p.vertex_count() == 3);
  check_structure(p);
  CHECK(oracle::same_point_sets(points(p), {vec({0, 0}), vec({1, 0}), vec({0, 1})}, 1e-6));
}

TEST_CASE("created vertices lie on the cut and the removed ones violate it") {
  Polytope p = Polytope::from_box(unit(3));
  Halfspace h{vec({0.3, -1.0, 2.0}), -0.9};
  auto report = p.cut(h);
  REQUIRE(report.status == CutStatus::kApplied);
  for (VertexId id : report.created) CHECK(std::fabs(h.eval(p.vertex(id).coords)) <= 1e-8);
  for (const auto& r : report.removed) CHECK(h.eval(r.coords) > 0.0);
  for (VertexId id : p.vertex_ids()) CHECK(h.eval(p.vertex(id).coords) <= 1e-12);
}

TEST_CASE("random cut sequences agree with the subset oracle") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 2 + trial % 4;
    Polytope p = Polytope::from_box(unit(d));
    const int cuts = 3 + trial % 8;
    for (int c = 0; c < cuts; ++c) {
      Eigen::VectorXd a(d);
      for (int i = 0; i < d; ++i) a[i] = gauss(rng);
      Eigen::VectorXd through(d);
      for (int i = 0; i < d; ++i) through[i] = 0.2 + 0.6 * uni(rng);
      p.cut({a, -a.dot(through)});
    }
    CAPTURE(trial);
    check_structure(p);
    CHECK(oracle::same_point_sets(points(p), oracle::brute_force_vertices(p.halfspaces(), d)));
  }
}

TEST_CASE("ids increase and are never reused") {
  Polytope p = Polytope::from_box(unit(2));
  const auto before = p.vertices_created();
  auto report = p.cut({vec({1, 1}), -1.5});
  for (VertexId id : report.created) CHECK(id >= before);
  CHECK(!p.contains_vertex(report.removed[0].id));
  CHECK_THROWS_AS((void)p.vertex(report.removed[0].id), quadest::ValidationError);
  CHECK(std::is_sorted(p.vertex_ids().begin(), p.vertex_ids().end()));
}

TEST_CASE("dump lists one line per vertex") {
  Polytope p = Polytope::from_box(unit(2));
  const std::string s = p.dump();
  CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}

TEST_CASE("malformed halfspaces are rejected") {
  Polytope p = Polytope::from_box(unit(2));
  CHECK_THROWS_AS(p.cut({vec({0, 0}), 1.0}), quadest::ValidationError);
  CHECK_THROWS_AS(p.cut({vec({1, 0, 0}), 1.0}), quadest::ValidationError);
  CHECK_THROWS_AS(p.cut({vec({NAN, 0}), 1.0}), quadest::ValidationError);
}
