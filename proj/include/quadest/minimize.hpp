#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "quadest/box.hpp"
#include "quadest/expr.hpp"
#include "quadest/polytope.hpp"

namespace quadest {

struct MinimizeOptions {
  double tol = 1e-8;          // relative objective-decrease stopping tolerance
  int max_iterations = 2000;  // per start
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
};

/// Euclidean projection onto box ∩ {halfspaces} by Dykstra's alternating
/// projections (exact clamp when there are no halfspaces).
Eigen::VectorXd project_feasible(const Eigen::VectorXd& y, const BoxDomain& box,
                                 std::span<const Halfspace> constraints);

/// Minimizes a smooth convex `f` over box ∩ {constraints} by projected
/// gradient descent with Armijo backtracking, restarted from each of `starts`
/// (projected first); the best end point wins.
/// Throws SolverError if no start produces a finite value.
MinimizeResult minimize_convex(const Expression& f, const BoxDomain& box,
                               std::span<const Halfspace> constraints,
                               const std::vector<Eigen::VectorXd>& starts,
                               const MinimizeOptions& options = {});

}  // namespace quadest
