#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "quadest/box.hpp"
#include "quadest/expr.hpp"
#include "quadest/minimize.hpp"
#include "quadest/polytope.hpp"

namespace quadest {

/// Box intersected with external linear constraints, in vertex form.
struct ConstrainedRegion {
  BoxDomain box;
  std::vector<Halfspace> constraints;  // retained, as given
  std::vector<Halfspace> discarded;    // redundant when their turn came
  Polytope polytope;                   // over x only

  bool feasible(const Eigen::VectorXd& x, double tol = 1e-9) const;
  /// Mean of the polytope vertices (an interior point of the region).
  Eigen::VectorXd centroid() const;
  std::vector<Eigen::VectorXd> vertex_points() const;
};

/// Cuts the box polytope with each constraint in turn. Constraints that cut
/// nothing off the current polytope are discarded. Throws InfeasibleError
/// when a constraint would remove every vertex.
ConstrainedRegion intersect_box(const BoxDomain& box, std::span<const Halfspace> constraints);

/// Region x [t_lower, t_upper] over (x, t).
struct LiftedDomain {
  Polytope polytope;
  double t_lower = 0.0;
  double t_upper = 0.0;
  Eigen::VectorXd argmin;  // x attaining t_lower / factor
};

/// t_upper is the largest value of factor*f over the region vertices (a convex
/// function peaks at a vertex); t_lower minimizes factor*f over the region,
/// linear constraints included. Throws SolverError when the minimizer fails
/// and ValidationError when t_lower is not below t_upper.
LiftedDomain lift(const ConstrainedRegion& region, const Expression& f, double factor,
                  const MinimizeOptions& options = {});

}  // namespace quadest
