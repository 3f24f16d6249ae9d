#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "valuecert/expr.hpp"

using valuecert::Error;
using valuecert::ErrorKind;
using valuecert::Expression;
using valuecert::parse;
using Op = valuecert::Expression::Op;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no valuecert::Error thrown";
  return ErrorKind::Syntax;
}

}  // namespace

TEST(ExprParse, PowerOfDecisionVariable) {
  const Expression e = parse("x0^2", 1, 0);
  const auto* root = e.root();
  ASSERT_EQ(root->op, Op::Pow);
  EXPECT_EQ(root->exponent.num, 2);
  EXPECT_EQ(root->exponent.den, 1);
  EXPECT_EQ(root->lhs->op, Op::Variable);
  EXPECT_EQ(root->lhs->space, valuecert::VarSpace::Decision);
  EXPECT_EQ(root->lhs->index, 0u);
}

TEST(ExprParse, EqualityConstraintOfExample) {
  const Expression e = parse("y1 + y0^1.5", 0, 2);
  const auto* root = e.root();
  ASSERT_EQ(root->op, Op::Add);
  EXPECT_EQ(root->lhs->op, Op::Variable);
  EXPECT_EQ(root->lhs->index, 1u);
  ASSERT_EQ(root->rhs->op, Op::Pow);
  EXPECT_EQ(root->rhs->exponent.num, 3);
  EXPECT_EQ(root->rhs->exponent.den, 2);
  EXPECT_EQ(root->rhs->lhs->index, 0u);
}

TEST(ExprParse, FractionExponentForms) {
  EXPECT_EQ(parse("x0^3/2", 1, 0).root()->exponent.den, 2);
  EXPECT_EQ(parse("x0^(3/2)", 1, 0).root()->exponent.num, 3);
  EXPECT_EQ(parse("x0^(-1/3)", 1, 0).root()->exponent.num, -1);
  EXPECT_EQ(parse("x0^0.25", 1, 0).root()->exponent.den, 4);
}

TEST(ExprParse, NonConstantExponentRejected) {
  EXPECT_EQ(kind_of([] { parse("x0^x0", 1, 0); }), ErrorKind::NonConstantExponent);
}

TEST(ExprParse, IndexOutOfRangeIsDimensionError) {
  EXPECT_EQ(kind_of([] { parse("x1", 1, 0); }), ErrorKind::Dimension);
  EXPECT_EQ(kind_of([] { parse("y2", 0, 2); }), ErrorKind::Dimension);
}

TEST(ExprParse, SyntaxErrorsCarryPosition) {
  try {
    parse("x0 + * 2", 1, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Syntax);
    EXPECT_EQ(e.position(), 5u);
  }
  EXPECT_EQ(kind_of([] { parse("(x0", 1, 0); }), ErrorKind::Syntax);
  EXPECT_EQ(kind_of([] { parse("", 1, 0); }), ErrorKind::Syntax);
  EXPECT_EQ(kind_of([] { parse("z0", 1, 0); }), ErrorKind::Syntax);
}

TEST(ExprParse, UnaryMinusBindsLooserThanPower) {
  const double x[] = {3.0};
  EXPECT_DOUBLE_EQ(parse("-x0^2", 1, 0).evaluate(x), -9.0);
  EXPECT_DOUBLE_EQ(parse("(-x0)^2", 1, 0).evaluate(x), 9.0);
}

TEST(ExprEvaluate, Examples) {
  const double three[] = {3.0};
  EXPECT_EQ(parse("x0^2", 1, 0).evaluate(three), 9.0);
  const double frontier[] = {4.0, -8.0};
  EXPECT_EQ(parse("y1 + y0^1.5", 0, 2).evaluate(frontier), 0.0);
  const double half[] = {0.5, 0.0};
  EXPECT_EQ(parse("-y0", 0, 2).evaluate(half), -0.5);
}

TEST(ExprEvaluate, OddRootOfNegativeBase) {
  const double x[] = {-8.0};
  EXPECT_NEAR(parse("x0^(1/3)", 1, 0).evaluate(x), -2.0, 1e-15);
  EXPECT_NEAR(parse("x0^(2/3)", 1, 0).evaluate(x), 4.0, 1e-14);
}

TEST(ExprEvaluate, DomainErrors) {
  const double neg[] = {-1.0};
  const double zero[] = {0.0};
  EXPECT_EQ(kind_of([&] { parse("x0^1.5", 1, 0).evaluate(neg); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([&] { parse("1/x0", 1, 0).evaluate(zero); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([&] { parse("x0^(-1)", 1, 0).evaluate(zero); }), ErrorKind::Domain);
}

TEST(ExprEvaluate, WrongPointLength) {
  const double two[] = {1.0, 2.0};
  EXPECT_EQ(kind_of([&] { parse("x0", 1, 0).evaluate(two); }), ErrorKind::Dimension);
}

TEST(ExprGradient, Examples) {
  const double origin[] = {0.0, 0.0};
  EXPECT_EQ(parse("-y0", 0, 2).gradient(origin), (std::vector<double>{-1.0, 0.0}));
  EXPECT_EQ(parse("y1 + y0^1.5", 0, 2).gradient(origin), (std::vector<double>{0.0, 1.0}));
  const double tangent[] = {1.0, -1.0};
  const auto g = parse("y1 + y0^1.5", 0, 2).gradient(tangent);
  EXPECT_DOUBLE_EQ(g[0], 1.5);
  EXPECT_DOUBLE_EQ(g[1], 1.0);
  const auto fd = oracle::central_difference(
      [](const oracle::Vec& y) { return y[1] + std::pow(y[0], 1.5); }, {1.0, -1.0}, 0, 1e-6);
  EXPECT_NEAR(g[0], fd, 1e-8);
}

TEST(ExprGradient, OneSidedBoundaryDerivativeIsZero) {
  const double origin[] = {0.0};
  EXPECT_EQ(parse("x0^1.5", 1, 0).gradient(origin)[0], 0.0);
}

TEST(ExprGradient, SquareRootAtZeroIsNonDifferentiable) {
  const double origin[] = {0.0, 0.0};
  EXPECT_EQ(kind_of([&] { parse("y0^0.5", 0, 2).gradient(origin); }), ErrorKind::NonDifferentiable);
}

TEST(ExprGradient, MatchesCentralDifferencesOnRandomExpressions) {
  oracle::ExpressionGenerator gen(20241015, 3);
  int checked = 0;
  for (int trial = 0; checked < 1000; ++trial) {
    ASSERT_LT(trial, 5000) << "generator rejected too many cases";
    const std::string src = gen.any(4);
    const Expression e = parse(src, 3, 0);
    const oracle::Vec x = gen.point();
    const double f = e.evaluate(x);
    if (std::fabs(f) > 1e3) continue;  // keep rounding error of the difference quotient below tolerance
    const auto g = e.gradient(x);
    auto fn = [&](const oracle::Vec& p) { return e.evaluate(p); };
    for (std::size_t k = 0; k < 3; ++k) {
      const double fd = oracle::central_difference(fn, x, k, 1e-6);
      ASSERT_LE(std::fabs(g[k] - fd), 1e-5 * std::max(1.0, std::fabs(g[k])))
          << src << " d/dx" << k << " at (" << x[0] << "," << x[1] << "," << x[2] << ")";
    }
    ++checked;
  }
}

TEST(ExprPrint, RoundTripPreservesValues) {
  oracle::ExpressionGenerator gen(7, 2);
  for (int trial = 0; trial < 500; ++trial) {
    const Expression e = parse(gen.any(4), 2, 0);
    const std::string printed = valuecert::to_string(e);
    const Expression back = parse(printed, 2, 0);
    EXPECT_EQ(valuecert::to_string(back), printed);
    for (int k = 0; k < 5; ++k) {
      const oracle::Vec x = gen.point();
      EXPECT_EQ(back.evaluate(x), e.evaluate(x)) << printed;
    }
  }
}

TEST(ExprPrint, NegativeConstantsAndExponents) {
  const Expression e = parse("-2.5 * x0^(-1/2)", 1, 0);
  const Expression back = parse(valuecert::to_string(e), 1, 0);
  const double x[] = {4.0};
  EXPECT_EQ(back.evaluate(x), e.evaluate(x));
  EXPECT_DOUBLE_EQ(e.evaluate(x), -1.25);
}
