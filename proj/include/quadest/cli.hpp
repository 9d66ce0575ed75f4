#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadest/benchlib.hpp"
#include "quadest/cutplane.hpp"

namespace quadest::cli {

/// Runs the command line `args` (without the program name).
/// Exit codes: 0 success, 1 invalid input, 2 no convergence within limits.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::uint64_t seed = 0;
  int points_per_function = 5;
  double epsilon = 1e-3;
  long max_iterations = 100000;
  std::optional<long> time_limit_ms;
  int jobs = 1;
};

/// One underestimator built during a benchmark.
struct BenchRecord {
  std::string name;
  int dimension = 0;
  int point = 0;
  Eigen::VectorXd x0;
  std::string status;  // run status, or "Error"
  std::string error;
  double alpha = 0.0;
  long iterations = 0;
  std::size_t vertices = 0;
  double metric = 0.0;
  double cpu_ms = 0.0;  // thread CPU time spent inside the cutting-plane run
};

/// Per-dimension aggregate over successful records.
struct BenchRow {
  int dimension = 0;
  int n_functions = 0;
  int n_underestimators = 0;
  double avg_metric = 0.0, min_metric = 0.0, max_metric = 0.0;
  double avg_cpu_ms = 0.0, min_cpu_ms = 0.0, max_cpu_ms = 0.0;
  double avg_vertices = 0.0, min_vertices = 0.0, max_vertices = 0.0;
};

/// Records come back in corpus order, then point order, regardless of jobs.
std::vector<BenchRecord> run_bench(const std::vector<BenchmarkEntry>& corpus, const BenchOptions& options);
std::vector<BenchRow> summarize(const std::vector<BenchRecord>& records);

/// JSON object describing a result and its underestimator in original units.
std::string result_json(const ProblemInstance& inst, const RunResult& result);

/// Parses "lo,hi;lo,hi;..." and "v,v,...".
BoxDomain parse_bounds(const std::string& text);
Eigen::VectorXd parse_vector(const std::string& text);
/// One constraint per line, "a0 ... a{n-1} b" for a.x + b <= 0; '#' starts a comment.
std::vector<Halfspace> parse_constraints(std::istream& in, int n);

}  // namespace quadest::cli
