#pragma once

// Arithmetic expression language for criterion and constraint functions.
//
// Grammar:
//   expr     := term (('+'|'-') term)*
//   term     := factor (('*'|'/') factor)*
//   factor   := '-' factor | atom ['^' exponent]
//   atom     := number | ident | '(' expr ')'
//   exponent := ['-'] number ['/' integer] | '(' constant expr ')'
//   ident    := ('x'|'y') digits
//
// Exponents are rationals. `a^(r/s)` with odd s is the sign-aware real root,
// so it is defined for negative a; with even s it requires a >= 0.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "valuecert/error.hpp"

namespace valuecert {

enum class VarSpace { Decision, Criterion };

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const { return den == 1; }
  friend bool operator==(const Rational&, const Rational&) = default;

  static Rational reduced(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(ErrorKind::Syntax, "zero denominator in exponent");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    return {num, den};
  }
};

/// Shortest decimal text that round-trips to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v == 0.0 ? 0.0 : v);
  return std::string(buf, res.ptr);
}

namespace detail {

struct Dual {
  double v = 0.0;
  double d = 0.0;
};

/// Real power with rational exponent; throws DomainError outside the real domain.
inline double rational_pow(double base, const Rational& q) {
  if (q.num == 0) return 1.0;
  if (base == 0.0 && q.num < 0) {
    throw Error(ErrorKind::Domain, "zero raised to a negative power");
  }
  if (q.is_integer()) return std::pow(base, static_cast<double>(q.num));
  if (base < 0.0) {
    if (q.den % 2 == 0) {
      throw Error(ErrorKind::Domain, "negative base " + format_number(base) + " with even-denominator exponent " +
                                         std::to_string(q.num) + "/" + std::to_string(q.den));
    }
    const double mag = std::pow(-base, q.value());
    return (q.num % 2 != 0) ? -mag : mag;
  }
  return std::pow(base, q.value());
}

}  // namespace detail

class Expression {
 public:
  enum class Op { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg };

  struct Node {
    Op op = Op::Constant;
    double value = 0.0;
    VarSpace space = VarSpace::Decision;
    std::size_t index = 0;
    Rational exponent{};
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  Expression() = default;
  Expression(NodePtr root, std::size_t decision_dim, std::size_t criterion_dim)
      : root_(std::move(root)), decision_dim_(decision_dim), criterion_dim_(criterion_dim) {}

  static NodePtr constant(double v) {
    Node n;
    n.value = v;
    return std::make_shared<const Node>(std::move(n));
  }
  static NodePtr variable(VarSpace s, std::size_t i) {
    Node n;
    n.op = Op::Variable;
    n.space = s;
    n.index = i;
    return std::make_shared<const Node>(std::move(n));
  }
  static NodePtr binary(Op op, NodePtr a, NodePtr b) {
    Node n;
    n.op = op;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return std::make_shared<const Node>(std::move(n));
  }
  static NodePtr negate(NodePtr a) {
    Node n;
    n.op = Op::Neg;
    n.lhs = std::move(a);
    return std::make_shared<const Node>(std::move(n));
  }
  static NodePtr power(NodePtr base, Rational q) {
    Node n;
    n.op = Op::Pow;
    n.exponent = q;
    n.lhs = std::move(base);
    return std::make_shared<const Node>(std::move(n));
  }

  const Node* root() const { return root_.get(); }
  const NodePtr& root_ptr() const { return root_; }
  std::size_t decision_dim() const { return decision_dim_; }
  std::size_t criterion_dim() const { return criterion_dim_; }

  /// Dimension of the single variable space this expression lives in.
  std::size_t arity() const {
    if (decision_dim_ != 0 && criterion_dim_ != 0) {
      throw Error(ErrorKind::Dimension, "expression declared over both decision and criterion space");
    }
    return decision_dim_ + criterion_dim_;
  }

  double evaluate(std::span<const double> point) const {
    auto [x, y] = split(point);
    return evaluate(x, y);
  }

  double evaluate(std::span<const double> x, std::span<const double> y) const {
    check_dims(x, y);
    const double v = eval_value(*root_, x, y);
    if (!std::isfinite(v)) throw Error(ErrorKind::Domain, "non-finite value");
    return v;
  }

  /// Exact forward-mode derivative, one dual-number pass per variable.
  std::vector<double> gradient(std::span<const double> point) const {
    auto [x, y] = split(point);
    check_dims(x, y);
    const VarSpace space = decision_dim_ != 0 ? VarSpace::Decision : VarSpace::Criterion;
    std::vector<double> grad(point.size());
    for (std::size_t k = 0; k < point.size(); ++k) {
      const detail::Dual r = eval_dual(*root_, x, y, space, k);
      if (!std::isfinite(r.d)) {
        throw Error(ErrorKind::NonDifferentiable, "partial derivative " + std::to_string(k) + " is not finite");
      }
      grad[k] = r.d;
    }
    return grad;
  }

  bool has_variables() const { return has_vars(*root_); }

 private:
  std::pair<std::span<const double>, std::span<const double>> split(std::span<const double> point) const {
    if (decision_dim_ != 0 && criterion_dim_ != 0) {
      throw Error(ErrorKind::Dimension, "ambiguous point: expression spans both variable spaces");
    }
    if (criterion_dim_ != 0) return {{}, point};
    return {point, {}};
  }

  void check_dims(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != decision_dim_ || y.size() != criterion_dim_) {
      throw Error(ErrorKind::Dimension, "point dimension mismatch: expected " + std::to_string(decision_dim_) +
                                            " decision and " + std::to_string(criterion_dim_) +
                                            " criterion coordinates, got " + std::to_string(x.size()) + " and " +
                                            std::to_string(y.size()));
    }
  }

  static bool has_vars(const Node& n) {
    if (n.op == Op::Variable) return true;
    if (n.lhs && has_vars(*n.lhs)) return true;
    return n.rhs && has_vars(*n.rhs);
  }

  static double eval_value(const Node& n, std::span<const double> x, std::span<const double> y) {
    switch (n.op) {
      case Op::Constant: return n.value;
      case Op::Variable: return n.space == VarSpace::Decision ? x[n.index] : y[n.index];
      case Op::Add: return eval_value(*n.lhs, x, y) + eval_value(*n.rhs, x, y);
      case Op::Sub: return eval_value(*n.lhs, x, y) - eval_value(*n.rhs, x, y);
      case Op::Mul: return eval_value(*n.lhs, x, y) * eval_value(*n.rhs, x, y);
      case Op::Div: {
        const double den = eval_value(*n.rhs, x, y);
        if (den == 0.0) throw Error(ErrorKind::Domain, "division by zero");
        return eval_value(*n.lhs, x, y) / den;
      }
      case Op::Pow: return detail::rational_pow(eval_value(*n.lhs, x, y), n.exponent);
      case Op::Neg: return -eval_value(*n.lhs, x, y);
    }
    return 0.0;
  }

  static detail::Dual eval_dual(const Node& n, std::span<const double> x, std::span<const double> y, VarSpace space,
                                std::size_t k) {
    using detail::Dual;
    switch (n.op) {
      case Op::Constant: return {n.value, 0.0};
      case Op::Variable: {
        const double v = n.space == VarSpace::Decision ? x[n.index] : y[n.index];
        return {v, (n.space == space && n.index == k) ? 1.0 : 0.0};
      }
      case Op::Add: {
        auto a = eval_dual(*n.lhs, x, y, space, k);
        auto b = eval_dual(*n.rhs, x, y, space, k);
        return {a.v + b.v, a.d + b.d};
      }
      case Op::Sub: {
        auto a = eval_dual(*n.lhs, x, y, space, k);
        auto b = eval_dual(*n.rhs, x, y, space, k);
        return {a.v - b.v, a.d - b.d};
      }
      case Op::Mul: {
        auto a = eval_dual(*n.lhs, x, y, space, k);
        auto b = eval_dual(*n.rhs, x, y, space, k);
        return {a.v * b.v, a.d * b.v + a.v * b.d};
      }
      case Op::Div: {
        auto a = eval_dual(*n.lhs, x, y, space, k);
        auto b = eval_dual(*n.rhs, x, y, space, k);
        if (b.v == 0.0) throw Error(ErrorKind::Domain, "division by zero");
        return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
      }
      case Op::Pow: {
        auto a = eval_dual(*n.lhs, x, y, space, k);
        const Rational& q = n.exponent;
        const double v = detail::rational_pow(a.v, q);
        if (a.d == 0.0 || q.num == 0) return {v, 0.0};
        // d/da a^q = q a^(q-1); same denominator, so the same real-root branch applies.
        const Rational qm1{q.num - q.den, q.den};
        if (a.v == 0.0) {
          if (qm1.num < 0) throw Error(ErrorKind::NonDifferentiable, "power with exponent below 1 at zero base");
          const double slope = qm1.num == 0 ? q.value() : 0.0;
          return {v, slope * a.d};
        }
        return {v, q.value() * detail::rational_pow(a.v, qm1) * a.d};
      }
      case Op::Neg: {
        auto a = eval_dual(*n.lhs, x, y, space, k);
        return {-a.v, -a.d};
      }
    }
    return {};
  }

  NodePtr root_ = constant(0.0);
  std::size_t decision_dim_ = 0;
  std::size_t criterion_dim_ = 0;
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view src, std::size_t n, std::size_t p) : src_(src), n_(n), p_(p) {}

  Expression::NodePtr parse_all() {
    auto e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("operator or end of input");
    return e;
  }

 private:
  using NodePtr = Expression::NodePtr;
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& expected) const {
    std::string found = pos_ < src_.size() ? "'" + std::string(1, src_[pos_]) + "'" : "end of input";
    throw Error(ErrorKind::Syntax,
                "at position " + std::to_string(pos_) + ": expected " + expected + ", found " + found, pos_);
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  NodePtr parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expression::binary(Op::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expression::binary(Op::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    auto lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = Expression::binary(Op::Mul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = Expression::binary(Op::Div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_factor() {
    if (accept('-')) return Expression::negate(parse_factor());
    auto base = parse_atom();
    if (accept('^')) return Expression::power(base, parse_exponent());
    return base;
  }

  NodePtr parse_atom() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      auto e = parse_expr();
      if (!accept(')')) fail("')'");
      return e;
    }
    if (c == 'x' || c == 'y') return parse_ident();
    if (is_digit(c) || c == '.') return Expression::constant(lex_number().value);
    fail("number, variable, '-' or '('");
  }

  NodePtr parse_ident() {
    const std::size_t start = pos_;
    const char c = src_[pos_++];
    const std::size_t digits_start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ == digits_start) {
      pos_ = digits_start;
      fail("variable index digits");
    }
    std::size_t idx = 0;
    auto res = std::from_chars(src_.data() + digits_start, src_.data() + pos_, idx);
    if (res.ec != std::errc{}) throw Error(ErrorKind::Syntax, "variable index out of range", start);
    const VarSpace space = c == 'x' ? VarSpace::Decision : VarSpace::Criterion;
    const std::size_t dim = space == VarSpace::Decision ? n_ : p_;
    if (idx >= dim) {
      throw Error(ErrorKind::Dimension,
                  std::string(1, c) + std::to_string(idx) + " exceeds declared dimension " + std::to_string(dim), start);
    }
    return Expression::variable(space, idx);
  }

  struct NumberToken {
    double value;
    std::string mantissa;  // digits with the decimal point removed
    int scale;             // value = mantissa * 10^scale
  };

  NumberToken lex_number() {
    skip_ws();
    const std::size_t start = pos_;
    std::string mant;
    int scale = 0;
    while (pos_ < src_.size() && is_digit(src_[pos_])) mant += src_[pos_++];
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) {
        mant += src_[pos_++];
        --scale;
      }
    }
    if (mant.empty()) {
      pos_ = start;
      fail("digits");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      int sign = 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) {
        if (src_[p] == '-') sign = -1;
        ++p;
      }
      const std::size_t ds = p;
      while (p < src_.size() && is_digit(src_[p])) ++p;
      if (p == ds) {
        pos_ = p;
        fail("exponent digits");
      }
      int e = 0;
      std::from_chars(src_.data() + ds, src_.data() + p, e);
      scale += sign * e;
      pos_ = p;
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc{} || !std::isfinite(v)) throw Error(ErrorKind::Syntax, "bad number literal", start);
    return {v, mant, scale};
  }

  static Rational to_rational(const NumberToken& t, std::size_t at) {
    std::string digits = t.mantissa;
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
    if (digits.empty()) return {0, 1};
    if (digits.size() > 15 || t.scale > 15 || t.scale < -15) {
      throw Error(ErrorKind::Syntax, "exponent literal too long to represent as a rational", at);
    }
    std::int64_t num = std::stoll(digits);
    std::int64_t den = 1;
    for (int i = 0; i < -t.scale; ++i) den *= 10;
    for (int i = 0; i < t.scale; ++i) num *= 10;
    return Rational::reduced(num, den);
  }

  /// Continued-fraction recovery of a rational from a constant exponent value.
  static Rational approximate_rational(double v, std::size_t at) {
    constexpr std::int64_t kMaxDen = 1000000;
    const double target = v;
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = std::fabs(v);
    for (int iter = 0; iter < 64; ++iter) {
      const double a = std::floor(r);
      if (a > 1e15) break;
      const auto ai = static_cast<std::int64_t>(a);
      const std::int64_t h2 = ai * h1 + h0;
      const std::int64_t k2 = ai * k1 + k0;
      if (k2 > kMaxDen) break;
      h0 = h1;
      h1 = h2;
      k0 = k1;
      k1 = k2;
      if (std::fabs(static_cast<double>(h1) / static_cast<double>(k1) - std::fabs(target)) <=
          1e-12 * std::max(1.0, std::fabs(target)))
        return Rational::reduced(target < 0 ? -h1 : h1, k1);
      const double frac = r - a;
      if (frac < 1e-15) break;
      r = 1.0 / frac;
    }
    throw Error(ErrorKind::Syntax, "exponent " + format_number(v) + " is not a rational with small denominator", at);
  }

  Rational parse_exponent() {
    const char c = peek();
    const std::size_t at = pos_;
    if (c == 'x' || c == 'y') throw Error(ErrorKind::NonConstantExponent, "exponent must be a constant", at);
    if (c == '(') {
      ++pos_;
      auto e = parse_expr();
      if (!accept(')')) fail("')'");
      Expression probe(e, n_, p_);
      if (probe.has_variables()) throw Error(ErrorKind::NonConstantExponent, "exponent must be a constant", at);
      std::vector<double> zx(n_, 0.0), zy(p_, 0.0);
      return approximate_rational(probe.evaluate(zx, zy), at);
    }
    bool negative = false;
    if (accept('-')) negative = true;
    const char d = peek();
    if (d == 'x' || d == 'y') throw Error(ErrorKind::NonConstantExponent, "exponent must be a constant", at);
    if (!is_digit(d) && d != '.') fail("constant exponent");
    Rational q = to_rational(lex_number(), at);
    // A fraction literal such as 3/2 binds into the exponent.
    const std::size_t save = pos_;
    if (accept('/')) {
      skip_ws();
      if (pos_ < src_.size() && is_digit(src_[pos_])) {
        NumberToken den = lex_number();
        if (den.scale != 0 || den.mantissa.find_first_not_of('0') == std::string::npos) {
          pos_ = save;
        } else {
          Rational dq = to_rational(den, at);
          q = Rational::reduced(q.num, q.den * dq.num);
        }
      } else {
        pos_ = save;
      }
    }
    if (negative) q.num = -q.num;
    return q;
  }

  std::string_view src_;
  std::size_t n_;
  std::size_t p_;
  std::size_t pos_ = 0;
};

inline void print_node(const Expression::Node& n, std::string& out) {
  using Op = Expression::Op;
  switch (n.op) {
    case Op::Constant:
      if (n.value < 0) {
        out += "(-" + format_number(-n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      return;
    case Op::Variable:
      out += (n.space == VarSpace::Decision ? 'x' : 'y');
      out += std::to_string(n.index);
      return;
    case Op::Neg:
      out += "(-";
      print_node(*n.lhs, out);
      out += ")";
      return;
    case Op::Pow:
      out += "(";
      print_node(*n.lhs, out);
      out += ")^(" + std::to_string(n.exponent.num) + "/" + std::to_string(n.exponent.den) + ")";
      return;
    default: break;
  }
  const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? " * " : " / ";
  out += "(";
  print_node(*n.lhs, out);
  out += sym;
  print_node(*n.rhs, out);
  out += ")";
}

}  // namespace detail

/// Parses `source` over x0..x{decision_dim-1} and y0..y{criterion_dim-1}.
inline Expression parse(std::string_view source, std::size_t decision_dim, std::size_t criterion_dim) {
  detail::Parser parser(source, decision_dim, criterion_dim);
  return Expression(parser.parse_all(), decision_dim, criterion_dim);
}

/// Canonical fully parenthesized text; parses back to an equivalent expression.
inline std::string to_string(const Expression& e) {
  std::string out;
  detail::print_node(*e.root(), out);
  return out;
}

}  // namespace valuecert
