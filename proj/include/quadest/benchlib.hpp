#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "quadest/box.hpp"
#include "quadest/expr.hpp"
#include "quadest/polytope.hpp"

namespace quadest {

struct BenchmarkEntry {
  std::string name;
  std::string source;  // MINLPLib, GlobalLib, CUTE, CSTP or Synthetic
  int dimension = 0;
  std::string expression;  // text before parameter binding
  ParameterMap parameters;
  BoxDomain box;
  Expression f;
  std::optional<Eigen::VectorXd> x0;    // fixed construction point, if any
  std::vector<Halfspace> constraints;   // a.x + b <= 0
};

/// Manifest directory: $QUADEST_CORPUS_DIR when set, else the build-time default.
std::filesystem::path corpus_dir();

/// Parses one manifest (a JSON array of entries). Errors name the entry.
std::vector<BenchmarkEntry> load_manifest(const std::filesystem::path& path);

/// The 31 convex benchmark functions, ordered by dimension then manifest order.
std::vector<BenchmarkEntry> load_corpus();
std::vector<BenchmarkEntry> load_corpus(const std::filesystem::path& dir);

/// Five quadratic-like functions on [-1,1]^2 with construction point (0.5, 0.5).
std::vector<BenchmarkEntry> pathological_set();

/// exp(x0^2/2 + x1^2 + x0/4 + x1/4 + 1) on [0,1]^2, x0 = (1,1), with the
/// constraints x0 + x1 >= 1 and x0 <= x1.
BenchmarkEntry illustrative_example();

/// Searches the corpus, the pathological set and the illustrative example.
/// Throws ValidationError for unknown names.
BenchmarkEntry find_entry(std::string_view name);

}  // namespace quadest
