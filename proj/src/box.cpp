#include "quadest/box.hpp"

#include <cmath>
#include <string>

#include "quadest/error.hpp"

namespace quadest {

BoxDomain::BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw ValidationError("box bound vectors differ in length");
  if (lower_.size() == 0) throw ValidationError("box must have at least one coordinate");
  for (int i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) {
      throw ValidationError("box bound " + std::to_string(i) + " is not finite");
    }
    if (!(lower_[i] < upper_[i])) {
      throw ValidationError("degenerate interval for coordinate " + std::to_string(i));
    }
  }
}

bool BoxDomain::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
  }
  return true;
}

Eigen::VectorXd BoxDomain::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

std::vector<Eigen::VectorXd> BoxDomain::corners() const {
  const int d = dim();
  std::vector<Eigen::VectorXd> out;
  out.reserve(std::size_t{1} << d);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1u ? upper_[i] : lower_[i];
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace quadest
