#include "doctest.h"

#include "planar/errors.hpp"
#include "planar/expr.hpp"
#include "random_expr.hpp"

#include <cmath>

using namespace planar;
using planar::sym::x1;
using planar::sym::x2;

TEST_CASE("derivatives agree with central differences") {
  testing::RandomExpr gen(11);
  const double h = 1e-5;
  int checked = 0;
  for (int n = 0; n < 300; ++n) {
    const Expr e = gen(6);
    for (Var v : {Var::X1, Var::X2}) {
      const CompiledExpr f(e);
      const CompiledExpr df(simplify(differentiate(e, v)));
      const CompiledExpr df_raw(differentiate(e, v));
      for (int k = 0; k < 5; ++k) {
        const Point2 p = gen.point();
        const Point2 dp = v == Var::X1 ? Point2(h, 0) : Point2(0, h);
        double fd, sym_v, raw_v;
        try {
          fd = (f(p + dp) - f(p - dp)) / (2 * h);
          sym_v = df(p);
          raw_v = df_raw(p);
        } catch (const DomainError&) {
          continue;
        }
        ++checked;
        const double tol = 1e-6 * (1 + std::fabs(sym_v));
        CHECK_MESSAGE(std::fabs(sym_v - fd) <= tol, to_string(e));
        CHECK(std::fabs(sym_v - raw_v) <= 1e-9 * (1 + std::fabs(raw_v)));
      }
    }
  }
  CHECK(checked > 2000);
}

TEST_CASE("simplify preserves values") {
  testing::RandomExpr gen(23);
  std::size_t points = 0;
  for (int n = 0; n < 200; ++n) {
    const Expr e = gen(5);
    const Expr s = simplify(e);
    const CompiledExpr fe(e), fs(s);
    for (int k = 0; k < 60; ++k) {
      const Point2 p = gen.point();
      double a;
      try {
        a = fe(p);
      } catch (const DomainError&) {
        continue;
      }
      const double b = fs(p);
      ++points;
      CHECK_MESSAGE(std::fabs(a - b) <= 1e-9 * (1 + std::fabs(a)), (to_string(e) + " => " + to_string(s)));
    }
  }
  CHECK(points >= 10000);
}

TEST_CASE("serialise and parse round trip") {
  testing::RandomExpr gen(5);
  for (int n = 0; n < 200; ++n) {
    const Expr e = gen(5);
    CHECK(simplify(parse(to_string(e))) == simplify(e));
    CHECK(parse(to_string(e)) == parse(to_string(parse(to_string(e)))));
  }
  // Simplified forms reparse to themselves whenever their constants are exact.
  testing::RandomExpr exact(9, true);
  for (int n = 0; n < 200; ++n) {
    const Expr s = simplify(exact(5));
    CHECK_MESSAGE(simplify(parse(to_string(s))) == s, to_string(s), " reparsed ", to_string(simplify(parse(to_string(s)))));
  }
  const ParamSet ps{"a", "gamma", "omega0", "F", "omega", "k", "l", "J", "K", "mu"};
  const char* fields[] = {
      "x2",
      "-omega0*x1 - gamma*x2 + F*cos(omega*t)",
      "-k*x1*x2",
      "k*x1*x2 - l*x2",
      "x1*x2",
      "-(x1^2)",
      "x1 - x1^3",
      "-x1 + a*(1 - x1^2)*x2",
      "sin(x2)^(K+1)/sin(x1)^(J-1)",
      "-(sin(x1)^J)/sin(x2)^K",
      "mu*x1 - x1^3",
      "(x1^2 + x2^2)/2",
      "exp(-x1)*sqrt(x2^2 + 1)",
      "abs(x1 - x2)",
      "ln(x1) - x1 - x2",
      "x1^(1/3) + x2^-2",
      "1/(x1 - a*(1 - x1^2)*x2)",
      "2^x1",
      "-2^-x1",
      "x1/-x2",
      "x1 - -x2",
  };
  for (const char* f : fields) {
    const Expr e = parse(f, ps);
    const Expr s = simplify(e);
    CHECK_MESSAGE(simplify(parse(to_string(e), ps)) == s, f);
    CHECK_MESSAGE(simplify(parse(to_string(s), ps)) == s, f, " -> ", to_string(s));
  }
}

TEST_CASE("antiderivatives differentiate back") {
  const ParamSet ps{"k", "l", "a"};
  const char* cases[] = {"x1^3 - 2*x1 + 5", "1/x1", "l/(k*x1) - 1", "sin(2*x1 + x2)", "cos(x1)*x2^2", "exp(-3*x1)*k",
                         "1/(2*x1 + 1)", "(x1 + 1)^-2", "sqrt(x1)", "x1^a"};
  const ParamMap pm{{"k", 1.3}, {"l", 0.4}, {"a", 1.7}};
  for (const char* c : cases) {
    const Expr e = parse(c, ps);
    const Expr F = antiderivative(e, Var::X1);
    const Expr back = differentiate(F, Var::X1) - e;
    ZeroTestOptions opts;
    opts.params = &pm;
    opts.tol = 1e-9;
    CHECK_MESSAGE(is_identically_zero(back, Grid2::square(0.2, 2.5, 16), opts).zero, c, " -> ", to_string(F));
  }
  CHECK(to_string(antiderivative(parse("x1^2"), Var::X1)) == "x1^3/3");
  CHECK(simplify(antiderivative(parse("x2"), Var::X1)) == simplify(x1 * x2));
  CHECK_THROWS_AS(antiderivative(parse("sin(x1)*cos(x1)"), Var::X1), NoAntiderivative);
  CHECK_THROWS_AS(antiderivative(parse("sin(x1^2)"), Var::X1), NoAntiderivative);
  CHECK_THROWS_AS(antiderivative(parse("exp(x1)^x1"), Var::X1), NoAntiderivative);
}
