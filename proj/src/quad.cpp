#include "quadest/quad.hpp"

#include <algorithm>
#include <string>

#include "quadest/error.hpp"

namespace quadest {

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool is_psd(const Eigen::MatrixXd& m) {
  return min_eigenvalue(m) >= -1e-9 * std::max(1.0, m.norm());
}

QuadraticUnderestimator::QuadraticUnderestimator(Eigen::VectorXd x0, double f0, Eigen::VectorXd g0,
                                                 Eigen::MatrixXd h0, double alpha)
    : x0_(std::move(x0)), f0_(f0), g0_(std::move(g0)), h0_(std::move(h0)) {
  const auto n = x0_.size();
  if (g0_.size() != n || h0_.rows() != n || h0_.cols() != n) {
    throw ValidationError("Taylor data dimensions are inconsistent");
  }
  h0_ = 0.5 * (h0_ + h0_.transpose());
  if (!is_psd(h0_)) {
    throw ValidationError("Hessian at the construction point is not positive semidefinite (min eigenvalue " +
                          format_double(min_eigenvalue(h0_)) + ")");
  }
  set_alpha(alpha);
}

QuadraticUnderestimator QuadraticUnderestimator::build(const Expression& f, const Eigen::VectorXd& x0) {
  SecondOrder t = f.second_order(x0);
  return QuadraticUnderestimator(x0, t.value, std::move(t.grad), std::move(t.hessian), 1.0);
}

void QuadraticUnderestimator::set_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
  alpha_ = alpha;
}

double QuadraticUnderestimator::linear(const Eigen::VectorXd& x) const {
  return f0_ + g0_.dot(x - x0_);
}

double QuadraticUnderestimator::curvature(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd dx = x - x0_;
  return 0.5 * dx.dot(h0_ * dx);
}

std::optional<double> QuadraticUnderestimator::alpha_candidate(double f_xv, const Eigen::VectorXd& xv) const {
  const Eigen::VectorXd dx = xv - x0_;
  const double form = dx.dot(h0_ * dx);
  const double guard = 1e-12 * (1.0 + h0_.norm() * dx.squaredNorm());
  if (form <= guard) return std::nullopt;
  const double candidate = 2.0 * (f_xv - linear(xv)) / form;
  return std::clamp(candidate, 0.0, 1.0);
}

QuadraticUnderestimator QuadraticUnderestimator::scaled(double factor) const {
  return QuadraticUnderestimator(x0_, factor * f0_, factor * g0_, factor * h0_, alpha_);
}

}  // namespace quadest
