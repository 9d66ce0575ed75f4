#pragma once

#include <optional>

#include <Eigen/Dense>

#include "quadest/expr.hpp"

namespace quadest {

/// q(x) = f0 + g0.(x - x0) + 1/2 alpha (x - x0)' H0 (x - x0)
///
/// The first- and second-order data at x0 are cached at build time; only
/// alpha changes afterwards.
class QuadraticUnderestimator {
 public:
  /// Evaluates f and its derivatives at x0; alpha starts at 1.
  /// Throws ValidationError if the Hessian at x0 is not PSD (within tolerance).
  static QuadraticUnderestimator build(const Expression& f, const Eigen::VectorXd& x0);

  /// From already-known Taylor data (used when f is scaled by a constant).
  QuadraticUnderestimator(Eigen::VectorXd x0, double f0, Eigen::VectorXd g0, Eigen::MatrixXd h0,
                          double alpha = 1.0);

  const Eigen::VectorXd& x0() const { return x0_; }
  double f0() const { return f0_; }
  const Eigen::VectorXd& g0() const { return g0_; }
  const Eigen::MatrixXd& h0() const { return h0_; }
  double alpha() const { return alpha_; }
  int dim() const { return static_cast<int>(x0_.size()); }

  /// Throws ValidationError outside [0, 1].
  void set_alpha(double alpha);

  double eval(const Eigen::VectorXd& x) const { return linear(x) + alpha_ * curvature(x); }
  double eval(const Eigen::VectorXd& x, double alpha) const { return linear(x) + alpha * curvature(x); }

  /// The supporting hyperplane at x0 (q with alpha = 0).
  double linear(const Eigen::VectorXd& x) const;
  /// 1/2 (x - x0)' H0 (x - x0), i.e. dq/dalpha.
  double curvature(const Eigen::VectorXd& x) const;

  /// Largest alpha making q coincide with f at xv:
  ///   2 (f(xv) - f0 - g0.(xv - x0)) / ((xv - x0)' H0 (xv - x0)),
  /// clamped to [0, 1]. Empty when the quadratic form is below the guard
  /// 1e-12 (1 + |H0|_F |xv - x0|^2): there q equals the linear part, which
  /// already underestimates a convex f.
  std::optional<double> alpha_candidate(double f_xv, const Eigen::VectorXd& xv) const;
  std::optional<double> alpha_candidate(const Expression& f, const Eigen::VectorXd& xv) const {
    return alpha_candidate(f.eval(xv), xv);
  }

  /// Copy with every Taylor coefficient multiplied by `factor`.
  QuadraticUnderestimator scaled(double factor) const;

 private:
  Eigen::VectorXd x0_;
  double f0_ = 0.0;
  Eigen::VectorXd g0_;
  Eigen::MatrixXd h0_;
  double alpha_ = 1.0;
};

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

/// min eigenvalue >= -1e-9 max(1, |m|_F).
bool is_psd(const Eigen::MatrixXd& m);

}  // namespace quadest
