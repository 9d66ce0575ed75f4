#include "quadest/cutplane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "quadest/error.hpp"
#include "quadest/minimize.hpp"

namespace quadest {

std::string to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::kCut: return "cut";
    case TraceKind::kDecrement: return "decrement";
    case TraceKind::kConverge: return "converge";
    case TraceKind::kLimit: return "limit";
  }
  return "unknown";
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kConverged: return "Converged";
    case RunStatus::kTimeLimit: return "TimeLimit";
    case RunStatus::kIterationLimit: return "IterationLimit";
  }
  return "unknown";
}

std::string to_json_line(const TraceEvent& e) {
  nlohmann::ordered_json j;
  j["iteration"] = e.iteration;
  j["lb"] = std::isfinite(e.lower_bound) ? nlohmann::ordered_json(e.lower_bound) : nlohmann::ordered_json(nullptr);
  j["alpha"] = e.alpha;
  j["active"] = e.active;
  j["vertices"] = e.vertices;
  j["event"] = to_string(e.kind);
  return j.dump();
}

void validate(const Config& cfg) {
  if (!(cfg.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(cfg.bisection_tol > 0.0)) throw ValidationError("bisection tolerance must be positive");
  if (!(cfg.tmin_tol > 0.0)) throw ValidationError("minimizer tolerance must be positive");
  if (cfg.max_iterations < 0) throw ValidationError("iteration limit must be non-negative");
  if (cfg.time_limit && cfg.time_limit->count() < 0) throw ValidationError("time limit must be non-negative");
}

void validate(const ProblemInstance& inst) {
  const int n = inst.f.num_vars();
  if (n < 1 || n + 1 > kMaxVars) throw ValidationError("unsupported number of variables");
  if (inst.box.dim() != n) throw ValidationError("box dimension does not match the function");
  if (inst.x0.size() != n) throw ValidationError("construction point dimension does not match the function");
  if (!(inst.scaling > 0.0) || !std::isfinite(inst.scaling)) throw ValidationError("scaling must be positive");
  if (!inst.box.contains(inst.x0, 1e-12 * (1.0 + inst.box.width().norm()))) {
    throw ValidationError("construction point lies outside the box");
  }
  for (std::size_t j = 0; j < inst.linear_constraints.size(); ++j) {
    const Halfspace& h = inst.linear_constraints[j];
    validate(h);
    if (h.dim() != n) throw ValidationError("constraint " + std::to_string(j) + " has the wrong dimension");
    if (h.eval(inst.x0) > 1e-9 * (1.0 + h.normal.norm())) {
      throw ValidationError("construction point violates constraint " + std::to_string(j));
    }
  }
}

ScaleResult scale(const Expression& f, const BoxDomain& box, double tmin_tol) {
  std::vector<Eigen::VectorXd> corners = box.corners();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& c : corners) hi = std::max(hi, f.eval(c));
  std::vector<Eigen::VectorXd> starts{box.center()};
  starts.insert(starts.end(), corners.begin(), corners.end());
  MinimizeOptions opts;
  opts.tol = tmin_tol;
  const double lo = minimize_convex(f, box, {}, starts, opts).value;
  const double magnitude = std::max(std::fabs(lo), std::fabs(hi));
  if (!(magnitude > 0.0) || !std::isfinite(magnitude)) {
    throw ValidationError("cannot scale a function that is zero at its extremes");
  }
  return {1.0 / magnitude, lo, hi};
}

State initialize(const ProblemInstance& inst, const Config& cfg) {
  validate(inst);
  validate(cfg);
  const int n = inst.f.num_vars();

  ConstrainedRegion region = intersect_box(inst.box, inst.linear_constraints);
  MinimizeOptions opts;
  opts.tol = cfg.tmin_tol;
  LiftedDomain lifted = lift(region, inst.f, inst.scaling, opts);

  Eigen::VectorXd interior(n + 1);
  const Eigen::VectorXd xp = inst.box.clamp(region.centroid());
  interior.head(n) = xp;
  const double fp = inst.scaling * inst.f.eval(xp);
  const double margin = 1e-6 * (lifted.t_upper - lifted.t_lower);
  const double mid = 0.5 * (lifted.t_lower + lifted.t_upper);
  double tp = fp < mid - margin ? mid : 0.5 * (fp + lifted.t_upper);
  if (!(fp + margin < tp)) throw SolverError("no interior point of the epigraph at the domain center");
  interior[n] = tp;

  QuadraticUnderestimator q = QuadraticUnderestimator::build(inst.f, inst.x0).scaled(inst.scaling);
  std::vector<VertexId> active = lifted.polytope.vertex_ids();
  return State{std::move(region), std::move(lifted.polytope), std::move(interior), std::move(q),
               std::move(active), lifted.t_lower, lifted.t_upper};
}

Separation separate(const ProblemInstance& inst, const State& state, const Eigen::VectorXd& u,
                    const Config& cfg) {
  const int n = inst.f.num_vars();
  const Eigen::VectorXd& p = state.interior;
  auto gap = [&](double lambda) {
    const Eigen::VectorXd z = lambda * u + (1.0 - lambda) * p;
    return inst.scaling * inst.f.eval(inst.box.clamp(z.head(n))) - z[n];
  };
  double lo = 0.0;
  double hi = 1.0;
  if (!(gap(lo) < 0.0) || !(gap(hi) > 0.0)) {
    throw ValidationError("separation requires a vertex strictly outside the epigraph");
  }
  double lambda = 0.5;
  for (int it = 0; it < 200; ++it) {
    lambda = 0.5 * (lo + hi);
    const double g = gap(lambda);
    if (std::fabs(g) <= cfg.bisection_tol) break;
    (g > 0.0 ? hi : lo) = lambda;
    if (hi - lo <= std::numeric_limits<double>::epsilon()) break;
  }

  Eigen::VectorXd w = lambda * u + (1.0 - lambda) * p;
  const Eigen::VectorXd wx = inst.box.clamp(w.head(n));
  ValueGrad vg = inst.f.value_grad(wx);
  Halfspace h;
  h.normal.resize(n + 1);
  h.normal.head(n) = inst.scaling * vg.grad;
  h.normal[n] = -1.0;
  h.offset = inst.scaling * (vg.value - vg.grad.dot(wx));
  return {std::move(h), std::move(w), lambda};
}

namespace {

struct VertexTerms {
  double t = 0.0;
  double linear = 0.0;     // f0 + g0.(x - x0)
  double curvature = 0.0;  // 1/2 (x - x0)' H0 (x - x0)
};

}  // namespace

RunResult run(const ProblemInstance& inst, const Config& cfg) {
  const auto started = std::chrono::steady_clock::now();
  State state = initialize(inst, cfg);
  const int n = inst.f.num_vars();
  const double eps = cfg.epsilon;
  Polytope& poly = state.polytope;
  const QuadraticUnderestimator& q = state.q;

  std::vector<VertexTerms> terms;
  auto cache = [&](VertexId id) {
    if (terms.size() <= id) terms.resize(std::max<std::size_t>(id + 1, 2 * terms.size()));
    const Eigen::VectorXd& c = poly.vertex(id).coords;
    const Eigen::VectorXd x = c.head(n);
    terms[id] = {c[n], q.linear(x), q.curvature(x)};
  };
  for (VertexId id : poly.vertex_ids()) cache(id);

  double alpha = 1.0;
  auto objective = [&](VertexId id) {
    const VertexTerms& v = terms[id];
    return v.t - v.linear - alpha * v.curvature;
  };
  auto f_scaled = [&](const Eigen::VectorXd& x) { return inst.scaling * inst.f.eval(inst.box.clamp(x)); };

  RunResult result;
  result.scaling = inst.scaling;
  result.t_lower = state.t_lower;
  result.t_upper = state.t_upper;

  std::vector<VertexId> active = std::move(state.active);
  auto emit = [&](TraceKind kind, long iteration, double lb) {
    if (!cfg.trace) return;
    cfg.trace(TraceEvent{iteration, lb, alpha, active.size(), poly.vertex_count(), kind});
  };

  // Tries to lower alpha so that q meets f at x; returns true on success.
  auto decrement_at = [&](const Eigen::VectorXd& x, double fx) {
    if (!(fx - q.eval(x, alpha) < -eps)) return false;
    std::optional<double> candidate = q.alpha_candidate(fx, x);
    if (!candidate || !(*candidate < alpha)) return false;
    alpha = *candidate;
    result.decrement_points.push_back(x);
    return true;
  };

  long iteration = 0;
  for (;;) {
    // Check convergence. Ties go to the lowest id since `active` is ascending.
    double lb = std::numeric_limits<double>::infinity();
    VertexId argmin = 0;
    for (VertexId id : active) {
      const double v = objective(id);
      if (v < lb) {
        lb = v;
        argmin = id;
      }
    }
    result.lower_bound = lb;
    if (lb > -eps) {
      result.status = RunStatus::kConverged;
      emit(TraceKind::kConverge, iteration, lb);
      break;
    }
    if (iteration >= cfg.max_iterations) {
      result.status = RunStatus::kIterationLimit;
      emit(TraceKind::kLimit, iteration, lb);
      break;
    }
    if (cfg.time_limit && std::chrono::steady_clock::now() - started >= *cfg.time_limit) {
      result.status = RunStatus::kTimeLimit;
      emit(TraceKind::kLimit, iteration, lb);
      break;
    }
    ++iteration;
    result.lb_trace.push_back(lb);

    const Eigen::VectorXd u = poly.vertex(argmin).coords;
    const Eigen::VectorXd xu = u.head(n);
    const double fu = f_scaled(xu);

    bool refined = false;
    if (fu > u[n]) {
      Separation sep = separate(inst, state, u, cfg);
      CutReport report = poly.cut(sep.cut);
      if (report.status == CutStatus::kApplied) {
        refined = true;
        std::vector<VertexId> gone;
        gone.reserve(report.removed.size());
        for (const Vertex& r : report.removed) gone.push_back(r.id);
        std::sort(gone.begin(), gone.end());
        std::erase_if(active, [&](VertexId id) { return std::binary_search(gone.begin(), gone.end(), id); });

        // Lower alpha to the smallest coincidence value among new vertices
        // where the quadratic overestimates by more than eps.
        double best = alpha;
        std::optional<Eigen::VectorXd> best_point;
        for (VertexId id : report.created) {
          cache(id);
          const Eigen::VectorXd x = poly.vertex(id).coords.head(n);
          const double fx = f_scaled(x);
          if (!(fx - q.eval(x, alpha) < -eps)) continue;
          std::optional<double> candidate = q.alpha_candidate(fx, x);
          if (candidate && *candidate < best) {
            best = *candidate;
            best_point = x;
          }
        }
        if (best_point) {
          alpha = best;
          result.decrement_points.push_back(*best_point);
          emit(TraceKind::kDecrement, iteration, lb);
        }
        active.insert(active.end(), report.created.begin(), report.created.end());
      }
    }
    if (!refined) {
      // u is (numerically) on or inside the epigraph and cannot be cut off;
      // the overestimation it exhibits is real, so lower alpha right there.
      if (decrement_at(xu, fu)) {
        emit(TraceKind::kDecrement, iteration, lb);
      } else {
        std::erase(active, argmin);
      }
    }

    std::erase_if(active, [&](VertexId id) { return !(objective(id) < -eps); });
    result.alpha_trace.push_back(alpha);
    if (refined) emit(TraceKind::kCut, iteration, lb);
  }

  result.alpha = alpha;
  result.iterations = iteration;
  result.total_vertices = poly.vertices_created();
  result.offset = result.status == RunStatus::kConverged ? 0.0 : result.lower_bound;
  result.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return result;
}

QuadraticUnderestimator final_underestimator(const ProblemInstance& inst, const RunResult& result) {
  QuadraticUnderestimator q = QuadraticUnderestimator::build(inst.f, inst.x0);
  q.set_alpha(result.alpha);
  return q;
}

}  // namespace quadest
