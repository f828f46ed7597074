#include "doctest.h"

#include "planar/errors.hpp"
#include "planar/expr.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace planar;
using planar::sym::x1;
using planar::sym::x2;

namespace {

double at(const Expr& e, double a, double b, double t = 0.0, const ParamMap& p = {}) {
  return evaluate(e, Point2(a, b), t, p);
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
  CHECK(parse("x2") == x2);
  CHECK(parse("x1 - x1^3") == x1 - pow(x1, Expr(3.0)));
  CHECK(parse("2*x1 + 3") == Expr(2.0) * x1 + Expr(3.0));
  CHECK(parse("a^b^c", {"a", "b", "c"}) == pow(sym::p("a"), pow(sym::p("b"), sym::p("c"))));
  CHECK(parse("-x1^2") == pow(-x1, Expr(2.0)));
  CHECK(parse("1.5e-3").value() == doctest::Approx(1.5e-3));
  CHECK(parse("pi").value() == std::numbers::pi);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse("sin(y)*cos(theta)"), UnknownIdentifier);
  try {
    parse("x1 + * x2");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 5);
  }
  CHECK_THROWS_AS(parse("sin x1"), SyntaxError);
  CHECK_THROWS_AS(parse("(x1"), SyntaxError);
  CHECK_THROWS_AS(parse("x1 x2"), SyntaxError);
  CHECK_THROWS_AS(parse(""), SyntaxError);
}

TEST_CASE("evaluate") {
  CHECK(at(parse("sin(pi/2)"), 0, 0) == 1.0);
  CHECK(at(parse("(x1^2+x2^2)/2"), 1, 0) == 0.5);
  CHECK_THROWS_AS(at(parse("ln(x1)"), -1, 0), DomainError);
  CHECK_THROWS_AS(at(parse("1/x1"), 0, 0), DomainError);
  CHECK_THROWS_AS(at(parse("x1^-1"), 0, 0), DomainError);
  CHECK_THROWS_AS(at(parse("sqrt(x1)"), -1, 0), DomainError);
  CHECK_THROWS_AS(at(parse("x1^0.5"), -1, 0), DomainError);
  CHECK(at(parse("x1^3"), -2, 0) == -8.0);
  CHECK_THROWS_AS(at(parse("k*x1", {"k"}), 1, 0), UnknownIdentifier);
  CHECK(at(parse("k*x1", {"k"}), 2, 0, 0, {{"k", 3.0}}) == 6.0);
  CHECK(at(parse("sin(w*t)", {"w"}), 0, 0, 0.5, {{"w", 2.0}}) == std::sin(1.0));
}

TEST_CASE("compiled programs agree bit for bit") {
  const ParamMap p{{"a", 0.7}, {"k", 1.3}};
  const Expr e = parse("a*(x1^2-1)*x2 - sin(k*x1)/(1 + x2^2) + exp(-x1)*sqrt(abs(x2))", {"a", "k"});
  const CompiledExpr c(e, p);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 1000; ++i) {
    const Point2 q(u(rng), u(rng));
    CHECK(c(q) == evaluate(e, q, 0.0, p));
  }
  CHECK_THROWS_AS(CompiledExpr{e}, UnknownIdentifier);
  CHECK_THROWS_AS(CompiledExpr(parse("ln(x1)"))(-1.0, 0.0), DomainError);
}

TEST_CASE("differentiate") {
  const ParamSet ps{"gamma", "omega"};
  CHECK(simplify(differentiate(parse("x1 - x1^3"), Var::X1)) == simplify(parse("1 - 3*x1^2")));
  CHECK(simplify(differentiate(parse("gamma*x2^2/2", ps), Var::X2)) == simplify(parse("gamma*x2", ps)));
  CHECK(simplify(differentiate(parse("sin(omega*t)", ps), Var::T)) == simplify(parse("omega*cos(omega*t)", ps)));
  CHECK(simplify(differentiate(parse("x2"), Var::X1)).is_constant(0.0));
  const Expr d = differentiate(abs(x1), Var::X1);
  CHECK(at(d, 2, 0) == 1.0);
  CHECK(at(d, -2, 0) == -1.0);
  CHECK_THROWS_AS(at(d, 0, 0), DomainError);
}

TEST_CASE("simplify examples") {
  CHECK(simplify(Expr(0.0) * x1 + x2) == x2);
  CHECK(simplify(x1 * x2 - x1 * x2).is_constant(0.0));
  CHECK(to_string(simplify((Expr(1.0) - Expr(3.0) * pow(x1, Expr(2.0))) * Expr(1.0) + Expr(0.0))) == "1 - 3*x1^2");
  CHECK(to_string(simplify(parse("x2^2/2"))) == "x2^2/2");
  CHECK(to_string(simplify(parse("(x1+x2)^2"))) == "x1^2 + 2*x1*x2 + x2^2");
  CHECK(simplify(parse("cos(x1)^2 + sin(x1)^2")).is_constant(1.0));
  CHECK(simplify(parse("sin(-x1) + sin(x1)")).is_constant(0.0));
  CHECK(simplify(parse("sqrt(4)")).is_constant(2.0));
  CHECK(simplify(parse("sqrt(x1^2)")) == abs(x1));
  CHECK(simplify(parse("(x1^2*x2^4)^(1/2)")) == simplify(abs(x1) * pow(abs(x2), Expr(2.0))));
  CHECK(simplify(parse("x1^(1/2)*x1^(1/2)")) == x1);
  CHECK(simplify(parse("ln(exp(x1 + x2))")) == simplify(x1 + x2));
}

TEST_CASE("is_identically_zero") {
  const Grid2 g = Grid2::square(-2, 2, 16);
  auto r = is_identically_zero(simplify(x1 * x2 - x1 * x2), g);
  CHECK(r.zero);
  CHECK(r.mode == ZeroMode::Symbolic);

  const ParamSet ps{"k", "l"};
  const Expr F1 = parse("-k*x1*x2", ps), F2 = parse("k*x1*x2 - l*x2", ps);
  const Expr alpha = parse("1/(k*x1*x2)", ps);
  const Expr div = differentiate(alpha * F1, Var::X1) + differentiate(alpha * F2, Var::X2);
  CHECK(is_identically_zero(div, Grid2::square(0.1, 3, 16)).zero);

  const Expr vdp = parse("-x1 + a*(1 - x1^2)*x2", {"a"});
  const ParamMap pa{{"a", 0.7}};
  ZeroTestOptions opts;
  opts.params = &pa;
  const auto v = is_identically_zero(differentiate(vdp, Var::X2), g, opts);
  CHECK_FALSE(v.zero);
  CHECK(evaluate(differentiate(vdp, Var::X2), Point2(0, 0), 0, pa) == doctest::Approx(0.7));

  CHECK_THROWS_AS(is_identically_zero(parse("ln(x1)"), Grid2::square(-3, -1, 16)), DomainError);
  CHECK_THROWS_AS(is_identically_zero(x1, Grid2::square(-1, 1, 8)), std::invalid_argument);
}
