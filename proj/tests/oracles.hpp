// Independent reference computations used to check the library.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "quadest/box.hpp"
#include "quadest/expr.hpp"
#include "quadest/polytope.hpp"
#include "quadest/quad.hpp"

namespace oracle {

// Vertices of {v : h.eval(v) <= 0 for all h} found by solving every
// d-subset of the halfspaces as a linear system; deduplicated.
std::vector<Eigen::VectorXd> brute_force_vertices(const std::vector<quadest::Halfspace>& hs, int d,
                                                  double feas_tol = 1e-9);

// True when both lists hold the same points up to `tol` per coordinate.
bool same_point_sets(std::vector<Eigen::VectorXd> a, std::vector<Eigen::VectorXd> b, double tol = 1e-6);

// Tightest alpha on a uniform grid with `per_axis` points per axis:
// min of 2 (f - l) / ((x - x0)' H0 (x - x0)), clamped to [0, 1].
double grid_alpha(const quadest::Expression& f, const quadest::QuadraticUnderestimator& q,
                  const quadest::BoxDomain& box, int per_axis);

// Largest value of scale * (q - f) on the same grid, with q at its current alpha.
double grid_max_excess(const quadest::Expression& f, const quadest::QuadraticUnderestimator& q,
                       const quadest::BoxDomain& box, int per_axis, double scale);

// Central differences of values (gradient) and of the exact gradient (Hessian).
Eigen::VectorXd fd_gradient(const quadest::Expression& f, const Eigen::VectorXd& x, double rel_step = 1e-6);
Eigen::MatrixXd fd_hessian(const quadest::Expression& f, const Eigen::VectorXd& x, double rel_step = 1e-6);

// Box shrunk towards its center by `fraction` of each width on both sides.
quadest::BoxDomain shrink(const quadest::BoxDomain& box, double fraction);

}  // namespace oracle
