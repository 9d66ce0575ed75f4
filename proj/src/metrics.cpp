#include "quadest/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "quadest/error.hpp"

namespace quadest {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Eigen::VectorXd> latin_hypercube(int n_points, const BoxDomain& box, std::uint64_t seed) {
  if (n_points < 1) throw ValidationError("latin hypercube needs at least one point");
  const int d = box.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 1.0);
  std::vector<Eigen::VectorXd> points(n_points, Eigen::VectorXd(d));
  std::vector<int> strata(n_points);
  for (int i = 0; i < d; ++i) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    const double lo = box.lower(i);
    const double width = box.upper(i) - lo;
    for (int k = 0; k < n_points; ++k) {
      double u = (strata[k] + jitter(rng)) / n_points;
      u = std::min(u, 1.0);
      points[k][i] = std::min(lo + u * width, box.upper(i));
    }
  }
  return points;
}

TightnessReport tightness(const Expression& f, const QuadraticUnderestimator& q, const BoxDomain& box,
                          std::uint64_t seed) {
  return tightness(f, q, box, seed, 100 * box.dim());
}

TightnessReport tightness(const Expression& f, const QuadraticUnderestimator& q, const BoxDomain& box,
                          std::uint64_t seed, int n_samples) {
  TightnessReport report;
  report.seed = seed;
  report.n_samples = n_samples;
  for (const Eigen::VectorXd& x : latin_hypercube(n_samples, box, seed)) {
    const double l = q.linear(x);
    report.numerator += q.eval(x) - l;
    report.denominator += f.eval(x) - l;
  }
  if (report.denominator < 1e-12) {
    report.flat = true;
    report.metric = 1.0;
  } else {
    report.metric = report.numerator / report.denominator;
  }
  return report;
}

}  // namespace quadest
