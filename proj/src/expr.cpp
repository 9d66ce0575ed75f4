#include "quadest/expr.hpp"

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstring>
#include <functional>

#include "quadest/error.hpp"

namespace quadest {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, end);
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, int n_vars, const ParameterMap& params)
      : text_(text), n_vars_(n_vars), params_(params) {}

  Expression run() {
    if (n_vars_ < 0 || n_vars_ > kMaxVars) {
      throw ValidationError("variable count must lie in [0, " + std::to_string(kMaxVars) + "]");
    }
    parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    if (nodes_.empty()) fail("empty expression");
    return Expression(std::move(nodes_), n_vars_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  int push(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int binary(Op op, int lhs, int rhs) { return push(Node{op, 0.0, -1, lhs, rhs}); }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Op::kAdd, lhs, parse_product());
      } else if (accept('-')) {
        lhs = binary(Op::kSub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Op::kMul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(Op::kDiv, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (accept('-')) {
      int operand = parse_unary();
      // A negated literal is a negative literal.
      if (nodes_[operand].op == Op::kConst && operand == static_cast<int>(nodes_.size()) - 1) {
        nodes_[operand].value = -nodes_[operand].value;
        return operand;
      }
      return push(Node{Op::kNeg, 0.0, -1, operand, -1});
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    skip_space();
    std::size_t op_pos = pos_;
    if (!accept('^')) return base;
    int exponent = parse_unary();
    const Node& b = nodes_[base];
    const Node& e = nodes_[exponent];
    if (e.op != Op::kConst && !(b.op == Op::kConst && b.value > 0.0)) {
      throw ParseError("'^' requires a constant exponent or a positive constant base", op_pos);
    }
    return binary(Op::kPow, base, exponent);
  }

  int parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  int parse_number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t s = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ > s;
    };
    bool any = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      any = digits() || any;
    }
    if (!any) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (!digits()) pos_ = save;  // not an exponent, e.g. "2e" followed by something else
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return push(Node{Op::kConst, value, -1, -1, -1});
  }

  int parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string_view name = text_.substr(start, pos_ - start);

    skip_space();
    bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (call) {
      Op op;
      if (name == "exp") {
        op = Op::kExp;
      } else if (name == "log") {
        op = Op::kLog;
      } else if (name == "sqrt") {
        op = Op::kSqrt;
      } else {
        throw ParseError("unknown function '" + std::string(name) + "'", start);
      }
      ++pos_;
      int arg = parse_sum();
      expect(')');
      return push(Node{op, 0.0, -1, arg, -1});
    }

    if (auto it = params_.find(name); it != params_.end()) {
      return push(Node{Op::kConst, it->second, -1, -1, -1});
    }
    if (name.size() > 1 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
      int index = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec != std::errc() || index >= n_vars_) {
        throw ParseError("variable '" + std::string(name) + "' out of range for " +
                             std::to_string(n_vars_) + " variables",
                         start);
      }
      return push(Node{Op::kVar, 0.0, index, -1, -1});
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  int n_vars_;
  const ParameterMap& params_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

Expression Expression::parse(std::string_view text, int n_vars, const ParameterMap& params) {
  return ExpressionParser(text, n_vars, params).run();
}

// ---------------------------------------------------------------------------
// Printing and comparison
// ---------------------------------------------------------------------------

namespace {

void print_node(const std::vector<Node>& nodes, int i, std::string& out) {
  const Node& n = nodes[i];
  auto binary = [&](const char* op) {
    out += '(';
    print_node(nodes, n.lhs, out);
    out += op;
    print_node(nodes, n.rhs, out);
    out += ')';
  };
  auto call = [&](const char* fn) {
    out += fn;
    out += '(';
    print_node(nodes, n.lhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::kConst:
      if (std::signbit(n.value)) {
        out += "(-" + format_double(-n.value) + ")";
      } else {
        out += format_double(n.value);
      }
      break;
    case Op::kVar:
      out += "x" + std::to_string(n.var);
      break;
    case Op::kNeg:
      out += "(-";
      print_node(nodes, n.lhs, out);
      out += ')';
      break;
    case Op::kExp: call("exp"); break;
    case Op::kLog: call("log"); break;
    case Op::kSqrt: call("sqrt"); break;
    case Op::kAdd: binary(" + "); break;
    case Op::kSub: binary(" - "); break;
    case Op::kMul: binary(" * "); break;
    case Op::kDiv: binary(" / "); break;
    case Op::kPow: binary(" ^ "); break;
  }
}

bool equal_nodes(const std::vector<Node>& a, int i, const std::vector<Node>& b, int j) {
  const Node& x = a[i];
  const Node& y = b[j];
  if (x.op != y.op) return false;
  switch (x.op) {
    case Op::kConst:
      return std::memcmp(&x.value, &y.value, sizeof(double)) == 0;
    case Op::kVar:
      return x.var == y.var;
    case Op::kNeg:
    case Op::kExp:
    case Op::kLog:
    case Op::kSqrt:
      return equal_nodes(a, x.lhs, b, y.lhs);
    default:
      return equal_nodes(a, x.lhs, b, y.lhs) && equal_nodes(a, x.rhs, b, y.rhs);
  }
}

}  // namespace

std::string Expression::to_string() const {
  std::string out;
  print_node(nodes_, root(), out);
  return out;
}

bool Expression::structurally_equal(const Expression& other) const {
  return n_vars_ == other.n_vars_ && equal_nodes(nodes_, root(), other.nodes_, other.root());
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

// Truncated Taylor jet: value, gradient and (optionally) Hessian with respect
// to the expression variables.
template <bool Second>
struct Jet {
  double v = 0.0;
  std::array<double, kMaxVars> g{};
  std::array<double, Second ? kMaxVars * kMaxVars : 1> h{};
};

struct Context {
  int n;
};

// Scalar policy for plain doubles.
struct Plain {
  using T = double;
  static T constant(double c, const Context&) { return c; }
  static T variable(double x, int, const Context&) { return x; }
  static double val(const T& t) { return t; }
  static T chain(const T&, double f0, double, double, const Context&) { return f0; }
  static T add(const T& a, const T& b, const Context&) { return a + b; }
  static T sub(const T& a, const T& b, const Context&) { return a - b; }
  static T neg(const T& a, const Context&) { return -a; }
  static T mul(const T& a, const T& b, const Context&) { return a * b; }
};

template <bool Second>
struct JetPolicy {
  using T = Jet<Second>;
  static T constant(double c, const Context&) {
    T r;
    r.v = c;
    return r;
  }
  static T variable(double x, int i, const Context&) {
    T r;
    r.v = x;
    r.g[i] = 1.0;
    return r;
  }
  static double val(const T& t) { return t.v; }

  // phi(u) where phi(u.v) = f0, phi' = f1, phi'' = f2.
  static T chain(const T& u, double f0, double f1, double f2, const Context& c) {
    T r;
    r.v = f0;
    for (int i = 0; i < c.n; ++i) r.g[i] = f1 * u.g[i];
    if constexpr (Second) {
      for (int i = 0; i < c.n; ++i) {
        for (int j = 0; j < c.n; ++j) {
          r.h[i * kMaxVars + j] = f1 * u.h[i * kMaxVars + j] + f2 * u.g[i] * u.g[j];
        }
      }
    }
    return r;
  }
  static T add(const T& a, const T& b, const Context& c) {
    T r;
    r.v = a.v + b.v;
    for (int i = 0; i < c.n; ++i) r.g[i] = a.g[i] + b.g[i];
    if constexpr (Second) {
      for (int i = 0; i < c.n; ++i)
        for (int j = 0; j < c.n; ++j) r.h[i * kMaxVars + j] = a.h[i * kMaxVars + j] + b.h[i * kMaxVars + j];
    }
    return r;
  }
  static T neg(const T& a, const Context& c) {
    T r;
    r.v = -a.v;
    for (int i = 0; i < c.n; ++i) r.g[i] = -a.g[i];
    if constexpr (Second) {
      for (int i = 0; i < c.n; ++i)
        for (int j = 0; j < c.n; ++j) r.h[i * kMaxVars + j] = -a.h[i * kMaxVars + j];
    }
    return r;
  }
  static T sub(const T& a, const T& b, const Context& c) { return add(a, neg(b, c), c); }
  static T mul(const T& a, const T& b, const Context& c) {
    T r;
    r.v = a.v * b.v;
    for (int i = 0; i < c.n; ++i) r.g[i] = a.v * b.g[i] + b.v * a.g[i];
    if constexpr (Second) {
      for (int i = 0; i < c.n; ++i) {
        for (int j = 0; j < c.n; ++j) {
          const int k = i * kMaxVars + j;
          r.h[k] = a.v * b.h[k] + b.v * a.h[k] + a.g[i] * b.g[j] + b.g[i] * a.g[j];
        }
      }
    }
    return r;
  }
};

bool is_integer(double c) { return std::nearbyint(c) == c && std::fabs(c) < 1e9; }

template <class P>
typename P::T evaluate(const std::vector<Node>& nodes, const Eigen::VectorXd& x, const Context& ctx) {
  using T = typename P::T;
  std::vector<T> vals(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Node& n = nodes[k];
    switch (n.op) {
      case Op::kConst:
        vals[k] = P::constant(n.value, ctx);
        break;
      case Op::kVar:
        vals[k] = P::variable(x[n.var], n.var, ctx);
        break;
      case Op::kNeg:
        vals[k] = P::neg(vals[n.lhs], ctx);
        break;
      case Op::kAdd:
        vals[k] = P::add(vals[n.lhs], vals[n.rhs], ctx);
        break;
      case Op::kSub:
        vals[k] = P::sub(vals[n.lhs], vals[n.rhs], ctx);
        break;
      case Op::kMul:
        vals[k] = P::mul(vals[n.lhs], vals[n.rhs], ctx);
        break;
      case Op::kDiv: {
        const T& d = vals[n.rhs];
        const double v = P::val(d);
        if (v == 0.0) throw DomainError("division by zero");
        const double r = 1.0 / v;
        vals[k] = P::mul(vals[n.lhs], P::chain(d, r, -r * r, 2.0 * r * r * r, ctx), ctx);
        break;
      }
      case Op::kExp: {
        const double e = std::exp(P::val(vals[n.lhs]));
        vals[k] = P::chain(vals[n.lhs], e, e, e, ctx);
        break;
      }
      case Op::kLog: {
        const double v = P::val(vals[n.lhs]);
        if (!(v > 0.0)) throw DomainError("log of non-positive argument " + format_double(v));
        vals[k] = P::chain(vals[n.lhs], std::log(v), 1.0 / v, -1.0 / (v * v), ctx);
        break;
      }
      case Op::kSqrt: {
        const double v = P::val(vals[n.lhs]);
        if (v < 0.0) throw DomainError("sqrt of negative argument " + format_double(v));
        const double s = std::sqrt(v);
        if constexpr (std::is_same_v<P, Plain>) {
          vals[k] = s;
        } else {
          if (v == 0.0) throw DomainError("sqrt is not differentiable at 0");
          vals[k] = P::chain(vals[n.lhs], s, 0.5 / s, -0.25 / (v * s), ctx);
        }
        break;
      }
      case Op::kPow: {
        const Node& e = nodes[n.rhs];
        if (e.op == Op::kConst) {
          const double c = e.value;
          const double v = P::val(vals[n.lhs]);
          double f0, f1, f2;
          if (is_integer(c)) {
            if (c < 0.0 && v == 0.0) throw DomainError("division by zero in negative power");
            if (c == 0.0) {
              f0 = 1.0, f1 = 0.0, f2 = 0.0;
            } else if (c == 1.0) {
              f0 = v, f1 = 1.0, f2 = 0.0;
            } else {
              f0 = std::pow(v, c);
              f1 = c * std::pow(v, c - 1.0);
              f2 = c * (c - 1.0) * std::pow(v, c - 2.0);
            }
          } else {
            if (!(v > 0.0)) {
              throw DomainError("non-integer power of non-positive base " + format_double(v));
            }
            const double lv = std::log(v);
            f0 = std::exp(c * lv);
            f1 = c * std::exp((c - 1.0) * lv);
            f2 = c * (c - 1.0) * std::exp((c - 2.0) * lv);
          }
          vals[k] = P::chain(vals[n.lhs], f0, f1, f2, ctx);
        } else {
          // positive constant base, variable exponent
          const double lb = std::log(nodes[n.lhs].value);
          const double p = std::exp(lb * P::val(vals[n.rhs]));
          vals[k] = P::chain(vals[n.rhs], p, lb * p, lb * lb * p, ctx);
        }
        break;
      }
    }
    if (!std::isfinite(P::val(vals[k]))) throw DomainError("non-finite intermediate value");
  }
  return vals.back();
}

}  // namespace

void Expression::check_point(const Eigen::VectorXd& x) const {
  if (x.size() != n_vars_) {
    throw ValidationError("point has " + std::to_string(x.size()) + " coordinates, expected " +
                          std::to_string(n_vars_));
  }
  if (!x.allFinite()) throw ValidationError("point has non-finite coordinates");
}

double Expression::eval(const Eigen::VectorXd& x) const {
  check_point(x);
  return evaluate<Plain>(nodes_, x, Context{n_vars_});
}

ValueGrad Expression::value_grad(const Eigen::VectorXd& x) const {
  check_point(x);
  auto jet = evaluate<JetPolicy<false>>(nodes_, x, Context{n_vars_});
  ValueGrad out{jet.v, Eigen::VectorXd(n_vars_)};
  for (int i = 0; i < n_vars_; ++i) out.grad[i] = jet.g[i];
  return out;
}

Eigen::VectorXd Expression::grad(const Eigen::VectorXd& x) const { return value_grad(x).grad; }

SecondOrder Expression::second_order(const Eigen::VectorXd& x) const {
  check_point(x);
  auto jet = evaluate<JetPolicy<true>>(nodes_, x, Context{n_vars_});
  SecondOrder out{jet.v, Eigen::VectorXd(n_vars_), Eigen::MatrixXd(n_vars_, n_vars_)};
  for (int i = 0; i < n_vars_; ++i) {
    out.grad[i] = jet.g[i];
    for (int j = 0; j < n_vars_; ++j) out.hessian(i, j) = jet.h[i * kMaxVars + j];
  }
  return out;
}

Eigen::MatrixXd Expression::hessian(const Eigen::VectorXd& x) const { return second_order(x).hessian; }

}  // namespace quadest
