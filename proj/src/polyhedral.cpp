#include "quadest/polyhedral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "quadest/error.hpp"

namespace quadest {

bool ConstrainedRegion::feasible(const Eigen::VectorXd& x, double tol) const {
  if (!box.contains(x, tol * (1.0 + box.width().norm()))) return false;
  return std::all_of(constraints.begin(), constraints.end(),
                     [&](const Halfspace& h) { return h.eval(x) <= tol * (1.0 + h.normal.norm()); });
}

Eigen::VectorXd ConstrainedRegion::centroid() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(polytope.dim());
  for (VertexId id : polytope.vertex_ids()) c += polytope.vertex(id).coords;
  return c / static_cast<double>(polytope.vertex_count());
}

std::vector<Eigen::VectorXd> ConstrainedRegion::vertex_points() const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(polytope.vertex_count());
  for (VertexId id : polytope.vertex_ids()) out.push_back(polytope.vertex(id).coords);
  return out;
}

ConstrainedRegion intersect_box(const BoxDomain& box, std::span<const Halfspace> constraints) {
  ConstrainedRegion region{box, {}, {}, Polytope::from_box(box)};
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    const Halfspace& h = constraints[j];
    validate(h);
    if (h.dim() != box.dim()) {
      throw ValidationError("constraint " + std::to_string(j) + " has " + std::to_string(h.dim()) +
                            " coefficients, expected " + std::to_string(box.dim()));
    }
    CutReport report = region.polytope.cut(h);
    switch (report.status) {
      case CutStatus::kApplied:
        region.constraints.push_back(h);
        break;
      case CutStatus::kRedundant:
        region.discarded.push_back(h);
        break;
      case CutStatus::kEmpty:
        throw InfeasibleError("constraint " + std::to_string(j) + " empties the feasible region");
    }
  }
  return region;
}

LiftedDomain lift(const ConstrainedRegion& region, const Expression& f, double factor,
                  const MinimizeOptions& options) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw ValidationError("scale factor must be positive");
  const std::vector<Eigen::VectorXd> corners = region.vertex_points();

  double t_upper = -std::numeric_limits<double>::infinity();
  for (const auto& v : corners) t_upper = std::max(t_upper, factor * f.eval(region.box.clamp(v)));

  std::vector<Eigen::VectorXd> starts;
  starts.reserve(corners.size() + 1);
  starts.push_back(region.centroid());
  starts.insert(starts.end(), corners.begin(), corners.end());
  MinimizeResult best = minimize_convex(f, region.box, region.constraints, starts, options);
  const double t_lower = factor * best.value;

  if (!(t_lower < t_upper)) {
    throw ValidationError("function is constant over the region; nothing to underestimate");
  }
  return {Polytope::lift(region.polytope, t_lower, t_upper), t_lower, t_upper, std::move(best.x)};
}

}  // namespace quadest
