#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "quadest/box.hpp"
#include "quadest/expr.hpp"
#include "quadest/quad.hpp"

namespace quadest {

/// Derives an independent 64-bit seed from a base seed and a stream index
/// (splitmix64 finalizer), so per-function and per-point streams do not overlap.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Standard Latin hypercube: for every axis, one point per stratum
/// [k/n, (k+1)/n), strata permuted at random, uniform jitter inside each cell.
/// Throws ValidationError when n_points < 1.
std::vector<Eigen::VectorXd> latin_hypercube(int n_points, const BoxDomain& box, std::uint64_t seed);

struct TightnessReport {
  double metric = 0.0;
  int n_samples = 0;
  std::uint64_t seed = 0;
  double numerator = 0.0;    // sum of q - l
  double denominator = 0.0;  // sum of f - l
  bool flat = false;         // denominator below 1e-12; metric reported as 1
};

/// Monte-Carlo estimate of the fraction of the gap between f and its tangent
/// plane at x0 that q closes: sum(q - l) / sum(f - l) over 100 d LHS samples.
/// Throws DomainError if f cannot be evaluated at a sample.
TightnessReport tightness(const Expression& f, const QuadraticUnderestimator& q, const BoxDomain& box,
                          std::uint64_t seed);

/// Same, with an explicit sample count.
TightnessReport tightness(const Expression& f, const QuadraticUnderestimator& q, const BoxDomain& box,
                          std::uint64_t seed, int n_samples);

}  // namespace quadest
