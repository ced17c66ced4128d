#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "fdirac/errors.hpp"
#include "fdirac/expression.hpp"

using fdirac::EvalError;
using fdirac::Expression;
using fdirac::ParseError;

TEST(Expression, Examples) {
  EXPECT_NEAR(Expression::parse("sin(2*x)").eval(std::numbers::pi / 4), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(Expression::parse("0.5*(x - t)").eval(1.0, 0.25), 0.375);
  EXPECT_EQ(Expression::parse("pi").eval(0.7, 0.1), 3.141592653589793);
  EXPECT_EQ(Expression::parse("x^2").eval(3.0), 9.0);
}

TEST(Expression, SyntaxErrorOffset) {
  try {
    Expression::parse("1 + * 2");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
}

TEST(Expression, UnknownIdentifierNamed) {
  try {
    Expression::parse("2*y + 1");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 2u);
    EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos);
  }
  EXPECT_THROW(Expression::parse(""), ParseError);
  EXPECT_THROW(Expression::parse("sin(x"), ParseError);
  EXPECT_THROW(Expression::parse("pow(x)"), ParseError);
  EXPECT_THROW(Expression::parse("x 2"), ParseError);
}

TEST(Expression, NonFiniteIsAnError) {
  EXPECT_THROW(Expression::parse("1/x").eval(0.0), EvalError);
  EXPECT_THROW(Expression::parse("sqrt(x - 1)").eval(0.0), EvalError);
}

TEST(Expression, Precedence) {
  EXPECT_EQ(Expression::parse("2+3*4").eval(0), 14.0);
  EXPECT_EQ(Expression::parse("2^3^2").eval(0), 512.0);
  EXPECT_EQ(Expression::parse("-2^2").eval(0), -4.0);
  EXPECT_EQ(Expression::parse("2^-1").eval(0), 0.5);
  EXPECT_EQ(Expression::parse("8/4/2").eval(0), 1.0);
  EXPECT_EQ(Expression::parse("1-2-3").eval(0), -4.0);
  EXPECT_EQ(Expression::parse("pow(2, 10) + abs(-1)").eval(0), 1025.0);
  EXPECT_DOUBLE_EQ(Expression::parse("alpha*x").eval(2.0, 0.0, 0.5), 1.0);
  EXPECT_EQ(Expression::parse("1e-3*1E3").eval(0), 1.0);
}

TEST(Expression, VariableUse) {
  const Expression e = Expression::parse("sin(x) + t*pi");
  EXPECT_TRUE(e.uses_x());
  EXPECT_TRUE(e.uses_t());
  EXPECT_FALSE(e.uses_alpha());
  EXPECT_TRUE(Expression::parse("2*pi").is_constant());
  EXPECT_TRUE(Expression::parse("0.0").is_zero());
  EXPECT_FALSE(Expression::parse("x - x").is_zero());
}

namespace {

std::string random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 11);
  std::uniform_real_distribution<double> num(-3.0, 3.0);
  switch (pick(rng)) {
    case 0: return "x";
    case 1: return "t";
    case 2: return "pi";
    case 3: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", std::abs(num(rng)));
      return buf;
    }
    case 4: return random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1);
    case 5: return random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1);
    case 6: return random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1);
    case 7: return "(" + random_expr(rng, depth - 1) + ")/(2 + sin(" + random_expr(rng, depth - 1) + "))";
    case 8: return "-" + random_expr(rng, depth - 1);
    case 9: return "sin(" + random_expr(rng, depth - 1) + ")";
    case 10: return "exp(cos(" + random_expr(rng, depth - 1) + "))";
    default: return "abs(" + random_expr(rng, depth - 1) + ")^1.5";
  }
}

}  // namespace

TEST(ExpressionProperty, RenderParsesBackToTheSameFunction) {
  std::mt19937 rng(20240611);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string src = random_expr(rng, 4);
    const Expression e = Expression::parse(src);
    const Expression back = Expression::parse(e.render());
    for (double x : {0.0, 0.3, 1.7, 3.1}) {
      for (double t : {0.0, 0.9, 2.2}) {
        const double a = e.eval(x, t), b = back.eval(x, t);
        ASSERT_EQ(a, b) << src << "  ->  " << e.render();
      }
    }
    EXPECT_EQ(back.render(), e.render());
  }
}

TEST(ExpressionProperty, EvaluationIsPure) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Expression e = Expression::parse(random_expr(rng, 5));
    const double first = e.eval(1.234, 0.567);
    for (int k = 0; k < 5; ++k) ASSERT_EQ(e.eval(1.234, 0.567), first);
  }
}
