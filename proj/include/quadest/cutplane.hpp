#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadest/box.hpp"
#include "quadest/expr.hpp"
#include "quadest/polyhedral.hpp"
#include "quadest/polytope.hpp"
#include "quadest/quad.hpp"

namespace quadest {

enum class TraceKind { kCut, kDecrement, kConverge, kLimit };

/// One line of the optional run trace.
struct TraceEvent {
  long iteration = 0;
  double lower_bound = 0.0;  // LB of the iteration that produced the event
  double alpha = 1.0;        // alpha after the event
  std::size_t active = 0;    // |A| after the event
  std::size_t vertices = 0;  // live polytope vertices after the event
  TraceKind kind = TraceKind::kCut;
};

std::string to_string(TraceKind kind);
/// Single-line JSON object, no trailing newline.
std::string to_json_line(const TraceEvent& event);

struct Config {
  double epsilon = 1e-3;  // applied to the scaled function
  long max_iterations = 100000;
  std::optional<std::chrono::milliseconds> time_limit;
  double bisection_tol = 1e-10;
  double tmin_tol = 1e-8;
  std::uint64_t seed = 0;
  std::function<void(const TraceEvent&)> trace;
};

/// Throws ValidationError for non-positive tolerances or iteration limits.
void validate(const Config& cfg);

struct ProblemInstance {
  Expression f;
  BoxDomain box;
  Eigen::VectorXd x0;
  std::vector<Halfspace> linear_constraints;  // a.x + b <= 0 over x
  double scaling = 1.0;                       // the algorithm works on scaling * f
};

/// Checks dimensions, x0 inside the box and inside every constraint.
void validate(const ProblemInstance& inst);

struct ScaleResult {
  double factor = 1.0;  // 1 / max(|min f|, |max f|)
  double min_value = 0.0;
  double max_value = 0.0;
};

/// Scaling that maps the values of f over the box into [-1, 1]. The minimum
/// comes from the convex minimizer, the maximum from the box corners.
/// Throws ValidationError when f vanishes identically at both extremes.
ScaleResult scale(const Expression& f, const BoxDomain& box, double tmin_tol = 1e-8);

/// Everything the cutting-plane loop needs at iteration 0.
struct State {
  ConstrainedRegion region;
  Polytope polytope;          // over (x, t)
  Eigen::VectorXd interior;   // (x_p, t_p), strictly inside the epigraph
  QuadraticUnderestimator q;  // of the scaled function, alpha = 1
  std::vector<VertexId> active;
  double t_lower = 0.0;
  double t_upper = 0.0;
};

State initialize(const ProblemInstance& inst, const Config& cfg);

struct Separation {
  Halfspace cut;                 // over (x, t)
  Eigen::VectorXd boundary;      // w = lambda u + (1 - lambda) p
  double lambda = 0.0;
};

/// Supporting halfspace of the epigraph of scaling*f separating the vertex
/// `u` (which must lie outside the epigraph) from it. The boundary point w is
/// located by bisection on the segment from the interior point to u; the
/// returned halfspace is the linearization  g(x) + grad g(x_w).(x - x_w) - t <= 0.
/// Throws ValidationError when u is not strictly outside the epigraph.
Separation separate(const ProblemInstance& inst, const State& state, const Eigen::VectorXd& u,
                    const Config& cfg);

enum class RunStatus { kConverged, kTimeLimit, kIterationLimit };
std::string to_string(RunStatus status);

struct RunResult {
  double alpha = 1.0;
  double lower_bound = 0.0;  // final LB, scaled units
  long iterations = 0;
  std::size_t total_vertices = 0;  // vertices enumerated, initial lifted box included
  std::vector<Eigen::VectorXd> decrement_points;
  RunStatus status = RunStatus::kConverged;
  double offset = 0.0;  // 0 on convergence, else LB: q + offset underestimates
  double wall_time_ms = 0.0;
  double scaling = 1.0;
  double t_lower = 0.0;
  double t_upper = 0.0;
  std::vector<double> alpha_trace;  // alpha after each iteration
  std::vector<double> lb_trace;     // LB at the start of each iteration
};

/// The cutting-plane iteration: repeatedly separates the vertex of the
/// outer approximation that minimizes t - q(x), refines the vertex set,
/// lowers alpha to the coincidence value at any new vertex where q exceeds
/// f by more than epsilon, and stops once every remaining vertex satisfies
/// t - q(x) > -epsilon.
RunResult run(const ProblemInstance& inst, const Config& cfg = {});

/// The underestimator of the unscaled function with the alpha of `result`.
QuadraticUnderestimator final_underestimator(const ProblemInstance& inst, const RunResult& result);

}  // namespace quadest
