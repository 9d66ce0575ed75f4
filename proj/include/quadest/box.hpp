#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace quadest {

// Axis-aligned box  { x : lower_i <= x_i <= upper_i }.
class BoxDomain {
 public:
  BoxDomain() = default;

  // Throws ValidationError unless every bound is finite and lower < upper.
  BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  double lower(int i) const { return lower_[i]; }
  double upper(int i) const { return upper_[i]; }

  Eigen::VectorXd center() const { return 0.5 * (lower_ + upper_); }
  Eigen::VectorXd width() const { return upper_ - lower_; }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;

  // The 2^d corners; bit i of the index selects upper_i.
  std::vector<Eigen::VectorXd> corners() const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

}  // namespace quadest
