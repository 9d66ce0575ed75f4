#include "quadest/minimize.hpp"

#include <cmath>
#include <limits>

#include "quadest/error.hpp"

namespace quadest {

Eigen::VectorXd project_feasible(const Eigen::VectorXd& y, const BoxDomain& box,
                                 std::span<const Halfspace> constraints) {
  if (constraints.empty()) return box.clamp(y);

  const std::size_t m = constraints.size() + 1;
  std::vector<Eigen::VectorXd> increments(m, Eigen::VectorXd::Zero(y.size()));
  Eigen::VectorXd x = y;
  const double scale = 1.0 + y.norm() + box.width().norm();
  for (int cycle = 0; cycle < 1000; ++cycle) {
    const Eigen::VectorXd before = x;
    for (std::size_t i = 0; i < m; ++i) {
      Eigen::VectorXd z = x + increments[i];
      if (i + 1 == m) {
        x = box.clamp(z);
      } else {
        const Halfspace& h = constraints[i];
        const double excess = h.eval(z);
        x = excess > 0.0 ? Eigen::VectorXd(z - (excess / h.normal.squaredNorm()) * h.normal) : z;
      }
      increments[i] = z - x;
    }
    if ((x - before).norm() <= 1e-15 * scale) break;
  }
  return x;
}

namespace {

MinimizeResult descend(const Expression& f, const BoxDomain& box, std::span<const Halfspace> constraints,
                       Eigen::VectorXd x, const MinimizeOptions& options) {
  const double diameter = box.width().norm();
  ValueGrad vg = f.value_grad(x);
  double step = 0.0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const double gnorm = vg.grad.norm();
    if (gnorm == 0.0) break;
    if (step == 0.0) step = 0.1 * diameter / gnorm;

    bool accepted = false;
    bool stalled = false;
    Eigen::VectorXd y;
    double fy = 0.0;
    for (int bt = 0; bt < 80; ++bt) {
      y = project_feasible(x - step * vg.grad, box, constraints);
      const Eigen::VectorXd move = y - x;
      if (move.norm() <= 1e-14 * (1.0 + x.norm())) {
        stalled = true;
        break;
      }
      fy = f.eval(y);
      if (fy <= vg.value + 1e-4 * vg.grad.dot(move)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const double decrease = vg.value - fy;
    x = std::move(y);
    vg = f.value_grad(x);
    step *= 2.0;
    if (stalled || decrease <= options.tol * 1e-4 * (1.0 + std::fabs(vg.value))) break;
  }
  return {x, vg.value, it};
}

}  // namespace

MinimizeResult minimize_convex(const Expression& f, const BoxDomain& box,
                               std::span<const Halfspace> constraints,
                               const std::vector<Eigen::VectorXd>& starts, const MinimizeOptions& options) {
  MinimizeResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    Eigen::VectorXd x0 = project_feasible(start, box, constraints);
    MinimizeResult r;
    try {
      r = descend(f, box, constraints, std::move(x0), options);
    } catch (const DomainError&) {
      continue;
    }
    if (r.value < best.value) best = std::move(r);
  }
  if (!std::isfinite(best.value)) throw SolverError("convex minimization failed from every start");
  return best;
}

}  // namespace quadest
