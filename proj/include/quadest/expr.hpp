#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace quadest {

// Largest supported number of variables. Derivative buffers are sized
// statically from this.
inline constexpr int kMaxVars = 8;

using ParameterMap = std::map<std::string, double, std::less<>>;

enum class Op : std::uint8_t { kConst, kVar, kNeg, kExp, kLog, kSqrt, kAdd, kSub, kMul, kDiv, kPow };

struct Node {
  Op op = Op::kConst;
  double value = 0.0;  // kConst
  int var = -1;        // kVar
  int lhs = -1;        // unary operand or left child
  int rhs = -1;        // right child
};

struct ValueGrad {
  double value = 0.0;
  Eigen::VectorXd grad;
};

struct SecondOrder {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hessian;
};

/// Immutable scalar expression over variables x0..x{n-1}.
///
/// Nodes are stored in topological order (children precede parents, the root
/// is last), so evaluation is a single forward sweep. Gradients and Hessians
/// come from forward-mode propagation of second-order jets through that sweep
/// and are exact up to floating-point rounding. All evaluation entry points
/// are const and reentrant.
///
/// Domain violations (log or non-integer power of a non-positive argument,
/// negative sqrt, division by zero, overflow to a non-finite value) throw
/// DomainError instead of returning NaN.
class Expression {
 public:
  /// The constant 0 over no variables.
  Expression() : nodes_{Node{}} {}

  /// Parses `text` with variables x0..x{n_vars-1}. Identifiers found in
  /// `params` are bound to their numeric value as constants.
  ///
  /// Grammar: decimal/scientific numbers, `+ - * / ^` with the usual
  /// precedence, `^` right-associative and tighter than unary minus,
  /// functions exp/log/sqrt, parentheses. A `^` needs a constant exponent
  /// or a positive constant base.
  static Expression parse(std::string_view text, int n_vars, const ParameterMap& params = {});

  int num_vars() const { return n_vars_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return static_cast<int>(nodes_.size()) - 1; }

  double eval(const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;
  ValueGrad value_grad(const Eigen::VectorXd& x) const;
  SecondOrder second_order(const Eigen::VectorXd& x) const;

  /// Fully parenthesised text that parses back to an identical tree.
  std::string to_string() const;

  /// Same shape, same operators, bit-identical constants.
  bool structurally_equal(const Expression& other) const;

 private:
  Expression(std::vector<Node> nodes, int n_vars) : nodes_(std::move(nodes)), n_vars_(n_vars) {}

  void check_point(const Eigen::VectorXd& x) const;

  std::vector<Node> nodes_;
  int n_vars_ = 0;

  friend class ExpressionParser;
};

/// Shortest decimal text that reads back to exactly `v`.
std::string format_double(double v);

}  // namespace quadest
