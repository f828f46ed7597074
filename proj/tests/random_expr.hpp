// Random expression trees for property tests.
#pragma once

#include "planar/expr.hpp"

#include <random>

#include "doctest_expr.hpp"

namespace planar::testing {

class RandomExpr {
 public:
  explicit RandomExpr(std::uint64_t seed, bool variable_arguments = false)
      : rng_(seed), variable_arguments_(variable_arguments) {}

  Expr operator()(int depth) {
    if (depth <= 0 || pick(0, 9) < 2) return leaf();
    switch (pick(0, 11)) {
      case 0:
      case 1:
        return (*this)(depth - 1) + (*this)(depth - 1);
      case 2:
        return (*this)(depth - 1) - (*this)(depth - 1);
      case 3:
      case 4:
        return (*this)(depth - 1) * (*this)(depth - 1);
      case 5:
        return (*this)(depth - 1) / (Expr(1.5) + sin(arg(depth - 1)));
      case 6:
        return -(*this)(depth - 1);
      case 7:
        return pow(pick(0, 1) ? leaf() : sin(arg(depth - 1)), Expr(static_cast<double>(pick(2, 3))));
      case 8:
        return sin(arg(depth - 1));
      case 9:
        return cos(arg(depth - 1));
      case 10:
        return exp(sin(arg(depth - 1)));
      default:
        return ln(Expr(1.0) + pow(arg(depth - 1), Expr(2.0)));
    }
  }

  Point2 point(double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    const double a = u(rng_);
    return {a, u(rng_)};
  }

 private:
  Expr arg(int depth) {
    Expr e = (*this)(depth);
    if (variable_arguments_ && !depends_on(e, Var::X1) && !depends_on(e, Var::X2)) return e + sym::x2;
    return e;
  }

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Expr leaf() {
    switch (pick(0, 3)) {
      case 0:
        return sym::x1;
      case 1:
        return sym::x2;
      case 2:
        return Expr(static_cast<double>(pick(-3, 3)));
      default:
        return Expr(static_cast<double>(pick(1, 9)) / 4.0);
    }
  }

  std::mt19937_64 rng_;
  bool variable_arguments_;
};

}  // namespace planar::testing
